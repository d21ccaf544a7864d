// Monte Carlo BER harness: sweep (decoder x Eb/N0 grid), deterministic CSV
// output. Frames are keyed by (master_seed, grid index, frame index), so a
// sweep is a pure function of its configuration regardless of thread count.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wbe/decoders.hpp"

namespace wbe {

enum class DecoderKind { ml, decoupled, aml, iterative };

const char* decoder_name(DecoderKind kind);

struct SimConfig {
    int core_chips = 0;
    int core_users = 0;
    CoreVariant variant = CoreVariant::automatic;
    int dropped_row = 0;
    std::uint64_t code_seed = 1;
    long search_budget = 20000;
    int enlarge_d = 1;  // 1 = no enlargement; otherwise Hadamard K_d
    std::vector<DecoderKind> decoders;
    std::vector<double> ebn0_grid_db;  // strictly increasing; +inf = noiseless
    long frames_per_point = 0;
    long max_bit_errors = 500;  // early stop; 0 disables
    std::uint64_t master_seed = 1;
    IterativeParams iterative;
};

struct BerPoint {
    std::string decoder;
    double ebn0_db = 0.0;
    long long bits_sent = 0;
    long long bit_errors = 0;
    double ber = 0.0;
};

// Flat "key = value" text with '#' comments; lists comma-separated.
SimConfig parse_config(std::istream& in);
void validate_config(const SimConfig& cfg);

// The code under test plus its Kronecker structure when enlarged.
struct CodeSystem {
    CodeMatrix code;                   // what the channel transmits with
    std::optional<Enlargement> enl;    // present when enlarge_d > 1
    std::optional<AmlSplit> core_split;  // lazily built for the AML decoder
};

CodeSystem build_system(const SimConfig& cfg);

BerPoint run_point(const SimConfig& cfg, const CodeSystem& sys, int point_index,
                   DecoderKind decoder);
std::vector<BerPoint> run_sweep(const SimConfig& cfg);

// Header "decoder,ebn0_db,bits_sent,bit_errors,ber"; 10 significant digits,
// LF line endings, C locale.
void write_csv(const std::vector<BerPoint>& points, std::ostream& out);
std::vector<BerPoint> read_csv(std::istream& in);

// WBE_THREADS cap (0/unset = hardware concurrency).
int thread_cap();

}  // namespace wbe
