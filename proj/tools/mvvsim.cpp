// mvvsim.cpp — command-line front end: run experiments, validate configs,
// and query the small-instance brute-force oracle.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvv/experiment.hpp"
#include "mvv/oracle.hpp"
#include "mvv/sampling.hpp"

namespace {

struct RunFlags {
    std::string config;
    std::string output;
    std::string sweep_k, sweep_gamma, schemes;
    uint64_t seed = 0;
    bool seed_set = false;
    bool emit_plotdata = false;
};

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

std::vector<std::string> parse_str_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    return out;
}

int cmd_run(const RunFlags& flags) {
    mvv::ExperimentConfig cfg = mvv::parse_config_file(flags.config);
    if (!flags.output.empty()) cfg.output = flags.output;
    if (flags.seed_set) cfg.seed = flags.seed;
    if (!flags.sweep_k.empty()) cfg.sweep_k = parse_int_list(flags.sweep_k);
    if (!flags.sweep_gamma.empty()) cfg.sweep_gamma = parse_double_list(flags.sweep_gamma);
    if (!flags.schemes.empty()) cfg.schemes = parse_str_list(flags.schemes);
    if (flags.emit_plotdata) cfg.emit_plotdata = true;

    const mvv::ExperimentResult res = mvv::run_experiment(cfg);
    std::printf("wrote %zu rows to %s\n", res.rows.size(), res.csv_path.c_str());
    return 0;
}

int cmd_validate(const std::string& path) {
    const mvv::ExperimentConfig cfg = mvv::parse_config_file(path);
    mvv::validate_config(cfg);
    const mvv::ViewLattice lattice = mvv::build_lattice(cfg.V, cfg.Q);
    std::printf("config OK: K=%d, %d views on the 1/%d lattice, %d subcarriers, schemes:",
                cfg.K, lattice.size(), cfg.Q, cfg.N);
    for (const auto& s : cfg.schemes) std::printf(" %s", s.c_str());
    std::printf("\n");
    return 0;
}

int cmd_oracle(const std::string& path) {
    mvv::ExperimentConfig cfg = mvv::parse_config_file(path);
    mvv::validate_config(cfg);
    const mvv::ViewLattice lattice = mvv::build_lattice(cfg.V, cfg.Q);
    mvv::SystemParams params = mvv::params_for(cfg, cfg.K);

    mvv::RngStream req_rng(cfg.seed, mvv::RngPurpose::requests, 0);
    const std::vector<int> requests =
        mvv::sample_requests(req_rng, cfg.K, cfg.zipf_gamma, lattice,
                             cfg.rank_permutation.empty() ? nullptr : &cfg.rank_permutation);
    for (int k = 0; k < cfg.K; ++k) params.users[k].request = requests[k];
    std::vector<double> deltas(cfg.K);
    for (int k = 0; k < cfg.K; ++k) deltas[k] = params.users[k].delta;

    std::vector<mvv::ChannelState> channels(cfg.n_channel_realizations);
    const mvv::MeanChannel mean = mvv::mean_channel_of(cfg, cfg.K);
    for (int c = 0; c < cfg.n_channel_realizations; ++c) {
        mvv::RngStream rng(cfg.seed, mvv::RngPurpose::channel, static_cast<uint64_t>(c));
        channels[c] = mvv::sample_channel(rng, params, mean.Hbar);
    }

    const mvv::OracleResult res =
        mvv::brute_force_optimum(requests, deltas, params, lattice, channels);
    std::printf("requests:");
    for (int r : requests) std::printf(" %s", lattice.view_name(r).c_str());
    std::printf("\nselections tried: %d\n", res.selections_tried);
    std::printf("optimal average weighted energy: %.12g J/slot\n", res.energy);
    std::printf("transmitted views:");
    for (int v = 0; v < lattice.size(); ++v)
        if (res.best.x[v]) std::printf(" %s", lattice.view_name(v).c_str());
    std::printf("\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"energy-optimal multi-view video multicast simulator"};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "run the configured experiment sweep");
    run->add_option("--config", run_flags.config, "experiment config file")->required();
    run->add_option("--output", run_flags.output, "CSV output path (overrides config)");
    auto* seed_opt = run->add_option("--seed", run_flags.seed, "RNG seed (overrides config)");
    run->add_option("--sweep-k", run_flags.sweep_k, "comma-separated K values");
    run->add_option("--sweep-gamma", run_flags.sweep_gamma, "comma-separated gamma values");
    run->add_option("--schemes", run_flags.schemes,
                    "comma-separated subset of algorithm1,baseline1,baseline2");
    run->add_flag("--emit-plotdata", run_flags.emit_plotdata,
                  "write per-sweep mean/stderr series per scheme");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate-config", "parse and validate a config file");
    validate->add_option("--config", validate_path, "experiment config file")->required();

    std::string oracle_path;
    auto* oracle = app.add_subcommand("oracle",
                                      "brute-force optimum of a small configured instance");
    oracle->add_option("--config", oracle_path, "experiment config file")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) {
            run_flags.seed_set = seed_opt->count() > 0;
            return cmd_run(run_flags);
        }
        if (validate->parsed()) return cmd_validate(validate_path);
        if (oracle->parsed()) return cmd_oracle(oracle_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
