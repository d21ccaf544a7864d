#include "wbe/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "wbe/channel.hpp"

namespace wbe {

namespace {

void fail(const std::string& msg) { throw std::invalid_argument(msg); }

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

long parse_long(const std::string& v, const std::string& key) {
    std::size_t pos = 0;
    long r = 0;
    try {
        r = std::stol(v, &pos);
    } catch (...) {
        fail("config: bad integer for " + key);
    }
    if (pos != v.size()) fail("config: bad integer for " + key);
    return r;
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    std::size_t pos = 0;
    std::uint64_t r = 0;
    try {
        r = std::stoull(v, &pos);
    } catch (...) {
        fail("config: bad integer for " + key);
    }
    if (pos != v.size()) fail("config: bad integer for " + key);
    return r;
}

double parse_double(const std::string& v, const std::string& key) {
    if (v == "inf") return std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    double r = 0.0;
    try {
        r = std::stod(v, &pos);
    } catch (...) {
        fail("config: bad number for " + key);
    }
    if (pos != v.size()) fail("config: bad number for " + key);
    return r;
}

DecoderKind parse_decoder(const std::string& v) {
    if (v == "ml") return DecoderKind::ml;
    if (v == "decoupled") return DecoderKind::decoupled;
    if (v == "aml") return DecoderKind::aml;
    if (v == "iterative") return DecoderKind::iterative;
    fail("config: unknown decoder '" + v + "'");
    return DecoderKind::ml;
}

}  // namespace

const char* decoder_name(DecoderKind kind) {
    switch (kind) {
        case DecoderKind::ml: return "ml";
        case DecoderKind::decoupled: return "decoupled";
        case DecoderKind::aml: return "aml";
        case DecoderKind::iterative: return "iterative";
    }
    return "?";
}

SimConfig parse_config(std::istream& in) {
    SimConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) fail("config: empty value for " + key);

        if (key == "core_l") {
            cfg.core_chips = static_cast<int>(parse_long(value, key));
        } else if (key == "core_k") {
            cfg.core_users = static_cast<int>(parse_long(value, key));
        } else if (key == "variant") {
            if (value == "auto")
                cfg.variant = CoreVariant::automatic;
            else if (value == "collide")
                cfg.variant = CoreVariant::collide;
            else if (value == "search")
                cfg.variant = CoreVariant::search;
            else
                fail("config: unknown variant '" + value + "'");
        } else if (key == "drop_row") {
            cfg.dropped_row = static_cast<int>(parse_long(value, key));
        } else if (key == "code_seed") {
            cfg.code_seed = parse_u64(value, key);
        } else if (key == "search_budget") {
            cfg.search_budget = parse_long(value, key);
        } else if (key == "enlarge_d") {
            cfg.enlarge_d = static_cast<int>(parse_long(value, key));
        } else if (key == "decoders") {
            cfg.decoders.clear();
            for (const auto& name : split_list(value)) cfg.decoders.push_back(parse_decoder(name));
        } else if (key == "ebn0_db") {
            cfg.ebn0_grid_db.clear();
            for (const auto& tok : split_list(value))
                cfg.ebn0_grid_db.push_back(parse_double(tok, key));
        } else if (key == "frames_per_point") {
            cfg.frames_per_point = parse_long(value, key);
        } else if (key == "max_bit_errors") {
            cfg.max_bit_errors = parse_long(value, key);
        } else if (key == "master_seed") {
            cfg.master_seed = parse_u64(value, key);
        } else if (key == "it_step") {
            cfg.iterative.step = parse_double(value, key);
        } else if (key == "it_iters") {
            cfg.iterative.iterations = static_cast<int>(parse_long(value, key));
        } else {
            fail("config: unknown key '" + key + "'");
        }
    }
    return cfg;
}

void validate_config(const SimConfig& cfg) {
    if (cfg.core_chips < 1 || cfg.core_users < 1) fail("config: core dimensions must be >= 1");
    if (cfg.enlarge_d < 1 || (cfg.enlarge_d & (cfg.enlarge_d - 1)) != 0)
        fail("config: enlarge_d must be a power of two");
    if (cfg.decoders.empty()) fail("config: no decoders selected");
    if (cfg.ebn0_grid_db.empty()) fail("config: empty Eb/N0 grid");
    for (std::size_t i = 0; i < cfg.ebn0_grid_db.size(); ++i) {
        if (std::isnan(cfg.ebn0_grid_db[i])) fail("config: NaN in Eb/N0 grid");
        if (i > 0 && !(cfg.ebn0_grid_db[i] > cfg.ebn0_grid_db[i - 1]))
            fail("config: Eb/N0 grid must be strictly increasing");
    }
    if (cfg.frames_per_point < 1) fail("config: frames_per_point must be >= 1");
    if (cfg.max_bit_errors < 0) fail("config: max_bit_errors must be >= 0");
    if (cfg.iterative.iterations < 1) fail("config: it_iters must be >= 1");
    if (cfg.iterative.step < 0.0) fail("config: it_step must be >= 0");
    if (cfg.search_budget < 1) fail("config: search_budget must be >= 1");
}

CodeSystem build_system(const SimConfig& cfg) {
    CodeSystem sys;
    CodeMatrix core = build_core(cfg.core_chips, cfg.core_users, cfg.code_seed, cfg.variant,
                                 cfg.dropped_row, cfg.search_budget);
    if (cfg.enlarge_d > 1) {
        const int d = cfg.enlarge_d;
        Matrix q = hadamard(d);
        const double scale = 1.0 / std::sqrt(static_cast<double>(d));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) q(i, j) *= scale;
        sys.code = enlarge_hadamard(d, core);
        sys.enl = make_enlargement(std::move(q), std::move(core));
    } else {
        sys.code = std::move(core);
    }
    const bool wants_aml = std::find(cfg.decoders.begin(), cfg.decoders.end(),
                                     DecoderKind::aml) != cfg.decoders.end();
    if (wants_aml) {
        const CodeMatrix& target = sys.enl ? sys.enl->core : sys.code;
        try {
            sys.core_split = choose_split(target);
        } catch (const singular_matrix_error& e) {
            fail(std::string("aml decoder: ") + e.what());
        }
    }
    return sys;
}

int thread_cap() {
    const char* env = std::getenv("WBE_THREADS");
    if (env && *env) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

void check_compatibility(const SimConfig& cfg, const CodeSystem& sys, DecoderKind kind) {
    switch (kind) {
        case DecoderKind::ml:
            if (sys.code.users > 24)
                fail("ml decoder: too many users for exhaustive search (max 24)");
            break;
        case DecoderKind::decoupled:
            if (!sys.enl) fail("decoupled decoder requires a Kronecker-enlarged code");
            if (sys.enl->core.users > 24) fail("decoupled decoder: core too large");
            break;
        case DecoderKind::aml: {
            if (!sys.core_split) fail("aml decoder: no column split available");
            const CodeMatrix& t = sys.enl ? sys.enl->core : sys.code;
            if (t.users - t.chips > 24) fail("aml decoder: tail too large");
            break;
        }
        case DecoderKind::iterative:
            break;
    }
    (void)cfg;
}

std::vector<double> decode_frame(const SimConfig& cfg, const CodeSystem& sys, DecoderKind kind,
                                 const std::vector<double>& y) {
    switch (kind) {
        case DecoderKind::ml:
            return decode_ml(sys.code, y).x_hat;
        case DecoderKind::decoupled:
            return decode_decoupled(*sys.enl, y).x_hat;
        case DecoderKind::aml: {
            if (!sys.enl) return decode_aml(sys.code, y, *sys.core_split).x_hat;
            // Rotate into the core frame, then AML each block.
            const Enlargement& e = *sys.enl;
            const std::vector<double> yp = rotate_to_core_frame(e, y);
            const int l = e.core.chips;
            const int k = e.core.users;
            std::vector<double> x_hat(static_cast<std::size_t>(e.d) * k);
            std::vector<double> block(l);
            for (int b = 0; b < e.d; ++b) {
                std::copy_n(yp.begin() + static_cast<std::size_t>(b) * l, l, block.begin());
                const DecoderOutcome r = decode_aml(e.core, block, *sys.core_split);
                std::copy_n(r.x_hat.begin(), k, x_hat.begin() + static_cast<std::size_t>(b) * k);
            }
            return x_hat;
        }
        case DecoderKind::iterative:
            return decode_iterative(sys.code, y, cfg.iterative).x_hat;
    }
    fail("unknown decoder");
    return {};
}

}  // namespace

BerPoint run_point(const SimConfig& cfg, const CodeSystem& sys, int point_index,
                   DecoderKind decoder) {
    validate_config(cfg);
    if (point_index < 0 || static_cast<std::size_t>(point_index) >= cfg.ebn0_grid_db.size())
        fail("run_point: point index out of range");
    check_compatibility(cfg, sys, decoder);

    const double ebn0 = cfg.ebn0_grid_db[point_index];
    const double sigma = ebn0_to_sigma(ebn0);
    const int bits_per_frame = sys.code.users;
    const long frames = cfg.frames_per_point;

    auto frame_errors = [&](long f) -> long {
        RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(point_index),
                      static_cast<std::uint64_t>(f));
        const std::vector<double> x = random_bits(bits_per_frame, rng);
        const std::vector<double> y = transmit(sys.code, x, sigma, rng);
        const std::vector<double> x_hat = decode_frame(cfg, sys, decoder, y);
        long errs = 0;
        for (int j = 0; j < bits_per_frame; ++j)
            if (x[j] != x_hat[j]) ++errs;
        return errs;
    };

    // Frames run in fixed batches; waves of batches execute in parallel but
    // the early-stop decision scans batches in index order, so the set of
    // counted frames never depends on the thread count.
    constexpr long kBatch = 64;
    constexpr long kWaveBatches = 16;
    const long nbatches = (frames + kBatch - 1) / kBatch;

    long long errors = 0;
    long frames_done = 0;
    bool stopped = false;
    const int threads = thread_cap();

    for (long wave = 0; wave < nbatches && !stopped; wave += kWaveBatches) {
        const long wave_end = std::min(nbatches, wave + kWaveBatches);
        std::vector<long long> batch_err(wave_end - wave, 0);

        auto run_batch = [&](long b) {
            const long first = b * kBatch;
            const long last = std::min(frames, first + kBatch);
            long long e = 0;
            for (long f = first; f < last; ++f) e += frame_errors(f);
            batch_err[b - wave] = e;
        };

        const int nworkers = static_cast<int>(std::min<long>(threads, wave_end - wave));
        if (nworkers <= 1) {
            for (long b = wave; b < wave_end; ++b) run_batch(b);
        } else {
            std::atomic<long> next{wave};
            std::vector<std::thread> pool;
            pool.reserve(nworkers);
            for (int w = 0; w < nworkers; ++w)
                pool.emplace_back([&] {
                    for (long b = next.fetch_add(1); b < wave_end; b = next.fetch_add(1))
                        run_batch(b);
                });
            for (auto& t : pool) t.join();
        }

        for (long b = wave; b < wave_end; ++b) {
            errors += batch_err[b - wave];
            frames_done = std::min(frames, (b + 1) * kBatch);
            if (cfg.max_bit_errors > 0 && errors >= cfg.max_bit_errors) {
                stopped = true;
                break;
            }
        }
    }

    BerPoint p;
    p.decoder = decoder_name(decoder);
    p.ebn0_db = ebn0;
    p.bits_sent = static_cast<long long>(frames_done) * bits_per_frame;
    p.bit_errors = errors;
    p.ber = static_cast<double>(p.bit_errors) / static_cast<double>(p.bits_sent);
    return p;
}

std::vector<BerPoint> run_sweep(const SimConfig& cfg) {
    validate_config(cfg);
    const CodeSystem sys = build_system(cfg);
    for (DecoderKind kind : cfg.decoders) check_compatibility(cfg, sys, kind);
    std::vector<BerPoint> points;
    points.reserve(cfg.decoders.size() * cfg.ebn0_grid_db.size());
    for (DecoderKind kind : cfg.decoders)
        for (std::size_t gi = 0; gi < cfg.ebn0_grid_db.size(); ++gi)
            points.push_back(run_point(cfg, sys, static_cast<int>(gi), kind));
    return points;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

std::string fmt_g10(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt_ebn0(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::string s = fmt_g10(v);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

}  // namespace

void write_csv(const std::vector<BerPoint>& points, std::ostream& out) {
    out << "decoder,ebn0_db,bits_sent,bit_errors,ber\n";
    for (const auto& p : points)
        out << p.decoder << ',' << fmt_ebn0(p.ebn0_db) << ',' << p.bits_sent << ','
            << p.bit_errors << ',' << fmt_g10(p.ber) << '\n';
    if (!out) throw std::runtime_error("write_csv: write failed");
}

std::vector<BerPoint> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "decoder,ebn0_db,bits_sent,bit_errors,ber")
        throw std::runtime_error("read_csv: bad header");
    std::vector<BerPoint> points;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string cur;
        std::istringstream ls(line);
        while (std::getline(ls, cur, ',')) fields.push_back(cur);
        if (fields.size() != 5) throw std::runtime_error("read_csv: bad row");
        BerPoint p;
        p.decoder = fields[0];
        p.ebn0_db = fields[1] == "inf" ? std::numeric_limits<double>::infinity()
                                       : std::strtod(fields[1].c_str(), nullptr);
        p.bits_sent = std::strtoll(fields[2].c_str(), nullptr, 10);
        p.bit_errors = std::strtoll(fields[3].c_str(), nullptr, 10);
        // ber is redundant with the integer fields; recompute so the
        // round-trip is exact.
        p.ber = p.bits_sent > 0
                    ? static_cast<double>(p.bit_errors) / static_cast<double>(p.bits_sent)
                    : std::strtod(fields[4].c_str(), nullptr);
        points.push_back(std::move(p));
    }
    return points;
}

}  // namespace wbe
