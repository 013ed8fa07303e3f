// test_experiment.cpp — config parsing, experiment rows, CSV determinism.
#include "mvv/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mvv/sampling.hpp"
#include "mvv/slot_alloc.hpp"
#include "test_util.hpp"

using namespace mvv;

namespace {

const char* kSmallConfig =
    "# toy experiment\n"
    "K = 2\n"
    "V = 2\n"
    "Q = 2\n"
    "N = 4\n"
    "R = 2.5e6\n"
    "B = 312500\n"
    "T = 0.1\n"
    "n0 = 1e-9\n"
    "E_b = 1e-3\n"
    "beta = 2\n"
    "E_u = 1e-3\n"
    "delta = 1.0\n"
    "channel_mean = 1e-6\n"
    "zipf_gamma = 0.5\n"
    "n_request_realizations = 2\n"
    "n_channel_realizations = 3\n"
    "seed = 42\n";

std::string strip_wall_column(const std::string& csv) {
    std::stringstream in(csv), out;
    std::string line;
    while (std::getline(in, line)) {
        const auto comma = line.rfind(',');
        out << line.substr(0, comma) << "\n";
    }
    return out.str();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void test_parse_and_validate() {
    ExperimentConfig cfg = parse_config_text(kSmallConfig);
    CHECK(cfg.K == 2);
    CHECK(cfg.Q == 2);
    CHECK(cfg.R == 2.5e6);
    CHECK(cfg.seed == 42);
    validate_config(cfg);  // should not throw

    // Missing R is reported by key name.
    std::string no_r;
    for (std::stringstream in(kSmallConfig); std::getline(in, no_r);) break;
    std::string text = kSmallConfig;
    text.replace(text.find("R = 2.5e6\n"), 10, "");
    bool named = false;
    try {
        validate_config(parse_config_text(text));
    } catch (const std::exception& e) {
        named = std::string(e.what()).find("R") != std::string::npos;
    }
    CHECK(named);

    CHECK_THROWS(parse_config_text("unknown_key = 3\n"));
    CHECK_THROWS(parse_config_text("K == 3\n"));

    // Scheme and sweep lists parse.
    ExperimentConfig cfg2 = parse_config_text(std::string(kSmallConfig) +
                                              "schemes = baseline1, baseline2\n"
                                              "sweep_k = 2,3\n"
                                              "dc.starts = 4\n");
    CHECK(cfg2.schemes.size() == 2);
    CHECK(cfg2.sweep_k == std::vector<int>({2, 3}));
    CHECK(cfg2.dc.starts == 4);

    // Per-user lists must cover the largest swept K.
    ExperimentConfig cfg3 = parse_config_text(std::string(kSmallConfig) + "sweep_k = 2,5\n");
    cfg3.E_u = {1e-3, 1e-3};
    CHECK_THROWS(validate_config(cfg3));

    SystemParams p = params_for(cfg, 2);
    CHECK(p.K() == 2 && p.users[0].synth_energy == 1e-3 && p.users[1].delta == 1.0);
    const MeanChannel m = mean_channel_of(cfg, 2);
    CHECK(m.Hbar == std::vector<double>(2, 1e-6));
}

void test_run_rows_and_determinism() {
    ExperimentConfig cfg = parse_config_text(kSmallConfig);
    cfg.output = "test_experiment_out.csv";
    const ExperimentResult res = run_experiment(cfg);
    CHECK(static_cast<int>(res.rows.size()) == 2 * 3);  // realizations x schemes

    for (const auto& row : res.rows) {
        CHECK(!row.infeasible);
        CHECK_REL(row.avg_energy, row.tx_energy + row.server_synth + row.user_synth_weighted,
                  1e-9);
        CHECK(row.tx_energy > 0);
        CHECK(row.views_transmitted >= 1);
    }

    const std::string first = slurp(cfg.output);
    const ExperimentResult res2 = run_experiment(cfg);
    const std::string second = slurp(cfg.output);
    CHECK(strip_wall_column(first) == strip_wall_column(second));
    CHECK(first.find("scheme,K,gamma,realization,avg_energy_J") == 0);
    std::remove(cfg.output.c_str());

    // Plot series appear on request, one file per scheme with a sane header.
    cfg.output = "test_experiment_plot.csv";
    cfg.emit_plotdata = true;
    cfg.sweep_k = {1, 2};
    run_experiment(cfg);
    for (const auto& scheme : cfg.schemes) {
        const std::string path = "test_experiment_plot_plot_" + scheme + ".csv";
        const std::string series = slurp(path);
        CHECK(series.find("x,y_mean,y_stderr") == 0);
        CHECK(series.find("\n1,") != std::string::npos);
        CHECK(series.find("\n2,") != std::string::npos);
        std::remove(path.c_str());
    }
    std::remove(cfg.output.c_str());
}

void test_single_view_natural_multicast() {
    // Everyone requests the same original view: baseline 1 is one multicast
    // transmission whose channel-averaged energy we can recompute directly.
    ExperimentConfig cfg = parse_config_text(kSmallConfig);
    cfg.output.clear();
    cfg.schemes = {"baseline1"};
    cfg.zipf_gamma = 50.0;  // all requests collapse to the rank-1 view
    cfg.n_request_realizations = 1;
    const ExperimentResult res = run_experiment(cfg);
    CHECK(res.rows.size() == 1);
    const auto& row = res.rows[0];
    CHECK(row.views_transmitted == 1);
    CHECK(row.server_synth == 0 && row.user_synth_weighted == 0);

    const ViewLattice l = build_lattice(cfg.V, cfg.Q);
    SystemParams p = params_for(cfg, cfg.K);
    for (auto& u : p.users) u.request = 0;
    Mat<uint8_t> y(cfg.K, l.size(), 0);
    for (int k = 0; k < cfg.K; ++k) y(k, 0) = 1;
    ViewSelection sel(y);
    double tx = 0;
    for (int c = 0; c < cfg.n_channel_realizations; ++c) {
        RngStream rng(cfg.seed, RngPurpose::channel, static_cast<uint64_t>(c));
        tx += solve_slot_allocation(sample_channel(rng, p, cfg.channel_mean), sel, p).energy;
    }
    tx /= cfg.n_channel_realizations;
    CHECK_REL(row.tx_energy, tx, 1e-12);
}

void test_infeasible_row_flag() {
    ExperimentConfig cfg = parse_config_text(kSmallConfig);
    cfg.output.clear();
    cfg.V = 5;
    cfg.Q = 1;
    cfg.N = 2;
    cfg.K = 3;
    cfg.schemes = {"baseline1"};
    cfg.zipf_gamma = 0.0;
    cfg.seed = 3;  // draws three distinct originals
    cfg.n_request_realizations = 4;
    const ExperimentResult res = run_experiment(cfg);
    bool saw_infeasible = false;
    for (const auto& row : res.rows) {
        if (row.views_transmitted > cfg.N) CHECK(row.infeasible);
        saw_infeasible = saw_infeasible || row.infeasible;
    }
    CHECK(saw_infeasible);
}

}  // namespace

int main() {
    test_parse_and_validate();
    test_run_rows_and_determinism();
    test_single_view_natural_multicast();
    test_infeasible_row_flag();
    return testutil::summary("test_experiment");
}
