// experiment.hpp — Monte Carlo experiment harness: configuration parsing,
// scheme orchestration, CSV output.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvv/dc_select.hpp"
#include "mvv/lattice.hpp"
#include "mvv/system.hpp"

namespace mvv {

struct ExperimentConfig {
    // System model (K users; scalar or per-user lists for E_u/delta/channel_mean).
    int K = 0;
    int V = 0;
    int Q = 0;
    int N = 0;
    double R = 0;
    double B = 0;
    double T = 0;
    double n0 = 0;
    double E_b = -1;
    double beta = 0;
    std::vector<double> E_u;
    std::vector<double> delta{1.0};
    std::vector<double> channel_mean;

    // Request model and Monte Carlo sizes.
    double zipf_gamma = 0;
    int n_request_realizations = 1;
    int n_channel_realizations = 1;
    std::vector<int> rank_permutation;  // empty = ascending view order

    std::vector<std::string> schemes{"algorithm1", "baseline1", "baseline2"};
    uint64_t seed = 0;
    std::string output = "results.csv";
    std::vector<int> sweep_k;
    std::vector<double> sweep_gamma;
    bool emit_plotdata = false;
    DCConfig dc;
};

// Flat `key = value` file; '#' starts a comment. Unknown keys are an error.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Throws std::invalid_argument naming the offending key.
void validate_config(const ExperimentConfig& cfg);

// Derived builders for one sweep point.
SystemParams params_for(const ExperimentConfig& cfg, int K);
MeanChannel mean_channel_of(const ExperimentConfig& cfg, int K);

struct ExperimentRow {
    std::string scheme;
    int K = 0;
    double gamma = 0;
    int realization = 0;
    double avg_energy = 0;           // J/slot: tx + server + weighted user
    double tx_energy = 0;            // channel-averaged transmission energy
    double server_synth = 0;         // E^(b)
    double user_synth_weighted = 0;  // beta * E^(u)
    int views_transmitted = 0;
    bool infeasible = false;
    double wall_ms = 0;
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;
    std::string csv_path;
};

// Runs every sweep point x request realization x scheme, averaging the slot
// transmission energy over the channel realizations. Writes the CSV (and
// optional per-sweep plot series) and returns the rows. Deterministic given
// (config, seed) up to the wall_ms column.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string csv_header();
std::string csv_line(const ExperimentRow& row);

}  // namespace mvv
