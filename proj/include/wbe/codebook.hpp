// Signature codebooks: construction (Hadamard seeds plus local TSC search),
// the TSC / Welch / Karystinos-Pados bound oracle, binary injectivity
// analysis, and the plain-text code file format.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "wbe/matrix.hpp"

namespace wbe {

// L x K signature matrix, columns normalized to unit energy. Binary
// antipodal codes additionally carry their exact sign pattern so Gram and
// injectivity computations stay in integer arithmetic (scale 1/sqrt(L)
// implied).
struct CodeMatrix {
    int chips = 0;  // L
    int users = 0;  // K
    Matrix mat;     // L x K
    bool binary = false;
    std::vector<std::int8_t> signs;  // row-major L*K, entries +-1, binary only

    static CodeMatrix from_signs(int chips, int users, std::vector<std::int8_t> signs);
    static CodeMatrix from_matrix(Matrix m);

    std::int8_t sign_at(int i, int j) const { return signs[static_cast<std::size_t>(i) * users + j]; }

    // C*x. For binary codes the integer image S*x is accumulated exactly and
    // scaled once, so colliding inputs produce bit-identical outputs.
    std::vector<double> times(const std::vector<double>& x) const;
};

struct TscReport {
    double tsc = 0.0;
    double welch = 0.0;
    double kp = 0.0;
    bool is_wbe = false;
    bool is_bwbe_candidate = false;  // binary and TSC at the KP bound
};

struct InjectivityReport {
    bool injective = false;
    // Colliding inputs as +-1 vectors; every unordered pair with equal image.
    std::vector<std::pair<std::vector<std::int8_t>, std::vector<std::int8_t>>> colliding_pairs;
    double noiseless_floor = 0.0;  // expected bit-error fraction at sigma = 0
};

// Sylvester construction; d must be a power of two. Entries +-1.
Matrix hadamard(int d);

// Sign pattern of H_order with one row removed (an (order-1) x order code seed).
std::vector<std::int8_t> row_deleted_hadamard_signs(int order, int dropped_row);

double tsc(const CodeMatrix& c);
double welch_bound(int chips, int users);
double kp_bound(int chips, int users);

TscReport classify(const CodeMatrix& c);

enum class CoreVariant {
    automatic,  // closed-form seed where available, otherwise search
    collide,    // [H_L | h_1]: same TSC as automatic at K = L+1 but non-injective
    search,     // pure min-TSC search from random starts
};

struct SearchResult {
    CodeMatrix code;
    double achieved_tsc = 0.0;
    std::vector<double> trace;  // best-so-far TSC after each accepted move
};

// Greedy best-improvement single-entry sign flips with random restarts.
// Stops when the KP bound is met or the move budget is exhausted.
SearchResult min_tsc_search(int chips, int users, long budget, std::uint64_t seed,
                            const std::vector<std::int8_t>* warm_start = nullptr);

CodeMatrix build_core(int chips, int users, std::uint64_t seed,
                      CoreVariant variant = CoreVariant::automatic,
                      int dropped_row = 0, long budget = 20000);

// Exhaustive over all 2^K inputs; exact integer collision detection. K <= 24.
InjectivityReport check_binary_injectivity(const CodeMatrix& c);

// ---------------------------------------------------------------------------
// Code file format. Line 1: "L K binary:{0|1}", then L rows of K entries
// (integers in {-1,1} when binary, decimals otherwise). Enlarged codes may
// carry one trailing sidecar line "# enlarged d=D core=LxK".
// ---------------------------------------------------------------------------

struct EnlargedSidecar {
    int d = 0;
    int core_chips = 0;
    int core_users = 0;
};

void write_code_file(const CodeMatrix& c, std::ostream& out,
                     const EnlargedSidecar* sidecar = nullptr);
CodeMatrix read_code_file(std::istream& in, std::optional<EnlargedSidecar>* sidecar_out = nullptr);

}  // namespace wbe
