// Command-line front end: codebook generation, bound queries, Kronecker
// enlargement, injectivity reports and Monte Carlo BER sweeps.
//
//   wbe gen 8 9 --seed 1 -o core.code
//   wbe bounds 8 9
//   wbe enlarge -c core.code -d 8 --hadamard -o big.code
//   wbe inject -c core.code
//   wbe sim -f sweep.cfg -o sweep.csv

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wbe/enlarge.hpp"
#include "wbe/sim.hpp"

namespace {

std::string g10(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

void print_classification(const wbe::CodeMatrix& code) {
    const wbe::TscReport rep = wbe::classify(code);
    const bool abwbe = rep.is_bwbe_candidate && !rep.is_wbe;
    std::cout << "L=" << code.chips << " K=" << code.users << " binary=" << (code.binary ? 1 : 0)
              << " tsc=" << g10(rep.tsc) << " welch=" << g10(rep.welch) << " kp=" << g10(rep.kp)
              << " wbe=" << (rep.is_wbe ? "true" : "false")
              << " abwbe=" << (abwbe ? "true" : "false") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"WBE signature codebooks, Kronecker enlargement and ML/AML decoding"};
    app.require_subcommand(1);

    // gen
    int gen_l = 0, gen_k = 0, gen_drop_row = 0;
    std::uint64_t gen_seed = 1;
    long gen_budget = 20000;
    std::string gen_variant = "auto";
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "build a binary core code and classify it");
    gen->add_option("L", gen_l, "spreading factor")->required()->check(CLI::PositiveNumber);
    gen->add_option("K", gen_k, "number of users")->required()->check(CLI::PositiveNumber);
    gen->add_option("--variant", gen_variant, "auto | collide | search")
        ->check(CLI::IsMember({"auto", "collide", "search"}));
    gen->add_option("--seed", gen_seed, "construction seed");
    gen->add_option("--drop-row", gen_drop_row, "row removed from the Hadamard seed");
    gen->add_option("--budget", gen_budget, "search move budget")->check(CLI::PositiveNumber);
    gen->add_option("-o,--output", gen_out, "write the code file here");

    // bounds
    int bounds_l = 0, bounds_k = 0;
    auto* bounds = app.add_subcommand("bounds", "print Welch and Karystinos-Pados TSC bounds");
    bounds->add_option("L", bounds_l, "spreading factor")->required()->check(CLI::PositiveNumber);
    bounds->add_option("K", bounds_k, "number of users")->required()->check(CLI::PositiveNumber);

    // enlarge
    std::string enl_core, enl_out;
    int enl_d = 0;
    bool enl_hadamard = false;
    std::uint64_t enl_seed = 1;
    auto* enl = app.add_subcommand("enlarge", "Kronecker-enlarge a core code");
    enl->add_option("-c,--core", enl_core, "core code file")->required();
    enl->add_option("-d", enl_d, "enlargement factor")->required()->check(CLI::PositiveNumber);
    enl->add_flag("--hadamard", enl_hadamard, "use Q = H_d / sqrt(d) (keeps binary codes binary)");
    enl->add_option("--seed", enl_seed, "seed for the random orthogonal Q");
    enl->add_option("-o,--output", enl_out, "write the enlarged code file here");

    // inject
    std::string inj_code;
    auto* inj = app.add_subcommand("inject", "binary injectivity report and noiseless error floor");
    inj->add_option("-c,--code", inj_code, "code file")->required();

    // sim
    std::string sim_cfg, sim_out;
    auto* sim = app.add_subcommand("sim", "run a Monte Carlo BER sweep");
    sim->add_option("-f,--config", sim_cfg, "sweep configuration file")->required();
    sim->add_option("-o,--output", sim_out, "CSV destination (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (*gen) {
            wbe::CoreVariant variant = wbe::CoreVariant::automatic;
            if (gen_variant == "collide") variant = wbe::CoreVariant::collide;
            if (gen_variant == "search") variant = wbe::CoreVariant::search;
            const wbe::CodeMatrix code =
                wbe::build_core(gen_l, gen_k, gen_seed, variant, gen_drop_row, gen_budget);
            print_classification(code);
            if (!gen_out.empty()) {
                auto out = open_output(gen_out);
                wbe::write_code_file(code, out);
            }
        } else if (*bounds) {
            const double w = wbe::welch_bound(bounds_l, bounds_k);
            const double kp = wbe::kp_bound(bounds_l, bounds_k);
            const bool equal = std::abs(w - kp) <= 1e-12;
            std::cout << "welch=" << g10(w) << ", kp=" << g10(kp)
                      << ", equal=" << (equal ? "true" : "false") << '\n';
        } else if (*enl) {
            auto in = open_input(enl_core);
            const wbe::CodeMatrix core = wbe::read_code_file(in);
            wbe::CodeMatrix big;
            if (enl_hadamard) {
                big = wbe::enlarge_hadamard(enl_d, core);
            } else {
                big = wbe::enlarge(wbe::random_orthogonal(enl_d, enl_seed), core);
            }
            print_classification(big);
            if (!enl_out.empty()) {
                const wbe::EnlargedSidecar sc{enl_d, core.chips, core.users};
                auto out = open_output(enl_out);
                wbe::write_code_file(big, out, &sc);
            }
        } else if (*inj) {
            auto in = open_input(inj_code);
            const wbe::CodeMatrix code = wbe::read_code_file(in);
            const wbe::InjectivityReport rep = wbe::check_binary_injectivity(code);
            std::cout << "injective=" << (rep.injective ? "true" : "false")
                      << " pairs=" << rep.colliding_pairs.size()
                      << " floor=" << g10(rep.noiseless_floor) << '\n';
        } else if (*sim) {
            auto in = open_input(sim_cfg);
            const wbe::SimConfig cfg = wbe::parse_config(in);
            const auto points = wbe::run_sweep(cfg);
            if (sim_out.empty()) {
                wbe::write_csv(points, std::cout);
            } else {
                auto out = open_output(sim_out);
                wbe::write_csv(points, out);
            }
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
