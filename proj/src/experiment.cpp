// experiment.cpp
#include "mvv/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mvv/baselines.hpp"
#include "mvv/parallel.hpp"
#include "mvv/sampling.hpp"
#include "mvv/slot_alloc.hpp"

namespace mvv {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument("config key " + key + ": not a number: '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument("config key " + key + ": not an integer: '" + v + "'");
    }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(parse_double(key, item));
    if (out.empty()) throw std::invalid_argument("config key " + key + ": empty list");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config key " + key + ": not a boolean: '" + v + "'");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "K") cfg.K = static_cast<int>(parse_int(key, val));
        else if (key == "V") cfg.V = static_cast<int>(parse_int(key, val));
        else if (key == "Q") cfg.Q = static_cast<int>(parse_int(key, val));
        else if (key == "N") cfg.N = static_cast<int>(parse_int(key, val));
        else if (key == "R") cfg.R = parse_double(key, val);
        else if (key == "B") cfg.B = parse_double(key, val);
        else if (key == "T") cfg.T = parse_double(key, val);
        else if (key == "n0") cfg.n0 = parse_double(key, val);
        else if (key == "E_b") cfg.E_b = parse_double(key, val);
        else if (key == "beta") cfg.beta = parse_double(key, val);
        else if (key == "E_u") cfg.E_u = parse_double_list(key, val);
        else if (key == "delta") cfg.delta = parse_double_list(key, val);
        else if (key == "channel_mean") cfg.channel_mean = parse_double_list(key, val);
        else if (key == "zipf_gamma") cfg.zipf_gamma = parse_double(key, val);
        else if (key == "n_request_realizations")
            cfg.n_request_realizations = static_cast<int>(parse_int(key, val));
        else if (key == "n_channel_realizations")
            cfg.n_channel_realizations = static_cast<int>(parse_int(key, val));
        else if (key == "rank_permutation") {
            cfg.rank_permutation.clear();
            for (const auto& item : split_list(val))
                cfg.rank_permutation.push_back(static_cast<int>(parse_int(key, item)));
        } else if (key == "schemes") {
            cfg.schemes = split_list(val);
        } else if (key == "seed") {
            cfg.seed = static_cast<uint64_t>(parse_int(key, val));
        } else if (key == "output") {
            cfg.output = val;
        } else if (key == "sweep_k") {
            cfg.sweep_k.clear();
            for (const auto& item : split_list(val))
                cfg.sweep_k.push_back(static_cast<int>(parse_int(key, item)));
        } else if (key == "sweep_gamma") {
            cfg.sweep_gamma = parse_double_list(key, val);
        } else if (key == "emit_plotdata") {
            cfg.emit_plotdata = parse_bool(key, val);
        } else if (key == "dc.starts") cfg.dc.starts = static_cast<int>(parse_int(key, val));
        else if (key == "dc.rho") cfg.dc.rho = parse_double(key, val);
        else if (key == "dc.rho_growth") cfg.dc.rho_growth = parse_double(key, val);
        else if (key == "dc.max_outer") cfg.dc.max_outer = static_cast<int>(parse_int(key, val));
        else if (key == "dc.max_escalations")
            cfg.dc.max_escalations = static_cast<int>(parse_int(key, val));
        else if (key == "dc.tol_obj") cfg.dc.tol_obj = parse_double(key, val);
        else if (key == "dc.tol_penalty") cfg.dc.tol_penalty = parse_double(key, val);
        else if (key == "dc.subproblem_tol") cfg.dc.subproblem_tol = parse_double(key, val);
        else if (key == "dc.L_floor") cfg.dc.L_floor = parse_double(key, val);
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void validate_config(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& key, const std::string& why) {
        throw std::invalid_argument("config key " + key + ": " + why);
    };
    if (cfg.K < 1) fail("K", "missing or not >= 1");
    if (cfg.V < 2) fail("V", "missing or not >= 2");
    if (cfg.Q < 1) fail("Q", "missing or not >= 1");
    if (cfg.N < 1) fail("N", "missing or not >= 1");
    if (!(cfg.R > 0)) fail("R", "missing or not > 0");
    if (!(cfg.B > 0)) fail("B", "missing or not > 0");
    if (!(cfg.T > 0)) fail("T", "missing or not > 0");
    if (!(cfg.n0 > 0)) fail("n0", "missing or not > 0");
    if (cfg.E_b < 0) fail("E_b", "missing or negative");
    if (!(cfg.beta >= 1)) fail("beta", "missing or not >= 1");
    if (cfg.E_u.empty()) fail("E_u", "missing");
    for (double e : cfg.E_u)
        if (e < 0) fail("E_u", "negative entry");
    if (cfg.channel_mean.empty()) fail("channel_mean", "missing");
    for (double m : cfg.channel_mean)
        if (!(m > 0)) fail("channel_mean", "entries must be > 0");
    for (double d : cfg.delta)
        if (d < 0) fail("delta", "negative entry");
    if (cfg.zipf_gamma < 0) fail("zipf_gamma", "must be >= 0");
    if (cfg.n_request_realizations < 1) fail("n_request_realizations", "must be >= 1");
    if (cfg.n_channel_realizations < 1) fail("n_channel_realizations", "must be >= 1");
    if (cfg.schemes.empty()) fail("schemes", "must list at least one scheme");
    for (const auto& s : cfg.schemes)
        if (s != "algorithm1" && s != "baseline1" && s != "baseline2")
            fail("schemes", "unknown scheme '" + s + "'");
    const int max_k = std::max(cfg.K, cfg.sweep_k.empty()
                                          ? cfg.K
                                          : *std::max_element(cfg.sweep_k.begin(), cfg.sweep_k.end()));
    auto check_per_user = [&](const char* key, size_t n) {
        if (n != 1 && static_cast<int>(n) < max_k)
            fail(key, "needs 1 entry or one per user (including sweep K values)");
    };
    check_per_user("E_u", cfg.E_u.size());
    check_per_user("delta", cfg.delta.size());
    check_per_user("channel_mean", cfg.channel_mean.size());
    for (int k : cfg.sweep_k)
        if (k < 1) fail("sweep_k", "entries must be >= 1");
    for (double g : cfg.sweep_gamma)
        if (g < 0) fail("sweep_gamma", "entries must be >= 0");
    if (!cfg.rank_permutation.empty()) {
        const ViewLattice lattice = build_lattice(cfg.V, cfg.Q);
        ZipfRequestModel(0.0, lattice, &cfg.rank_permutation);  // validates
    }
    if (cfg.dc.starts < 1) fail("dc.starts", "must be >= 1");
    if (!(cfg.dc.rho_growth > 1)) fail("dc.rho_growth", "must be > 1");
    if (cfg.dc.max_outer < 1) fail("dc.max_outer", "must be >= 1");
    if (!(cfg.dc.tol_obj > 0)) fail("dc.tol_obj", "must be > 0");
    if (!(cfg.dc.subproblem_tol > 0)) fail("dc.subproblem_tol", "must be > 0");
    if (!(cfg.dc.L_floor > 0)) fail("dc.L_floor", "must be > 0");
}

SystemParams params_for(const ExperimentConfig& cfg, int K) {
    SystemParams p;
    p.R = cfg.R;
    p.B = cfg.B;
    p.N = cfg.N;
    p.T = cfg.T;
    p.n0 = cfg.n0;
    p.E_b = cfg.E_b;
    p.beta = cfg.beta;
    p.users.resize(K);
    for (int k = 0; k < K; ++k) {
        p.users[k].delta = cfg.delta.size() == 1 ? cfg.delta[0] : cfg.delta[k];
        p.users[k].synth_energy = cfg.E_u.size() == 1 ? cfg.E_u[0] : cfg.E_u[k];
    }
    return p;
}

MeanChannel mean_channel_of(const ExperimentConfig& cfg, int K) {
    MeanChannel m;
    m.Hbar.resize(K);
    for (int k = 0; k < K; ++k)
        m.Hbar[k] = cfg.channel_mean.size() == 1 ? cfg.channel_mean[0] : cfg.channel_mean[k];
    return m;
}

std::string csv_header() {
    return "scheme,K,gamma,realization,avg_energy_J,tx_energy_J,server_synth_J,"
           "user_synth_weighted_J,views_transmitted,infeasible,wall_ms";
}

std::string csv_line(const ExperimentRow& row) {
    char buf[320];
    std::snprintf(buf, sizeof(buf), "%s,%d,%.12g,%d,%.12g,%.12g,%.12g,%.12g,%d,%d,%.3f",
                  row.scheme.c_str(), row.K, row.gamma, row.realization, row.avg_energy,
                  row.tx_energy, row.server_synth, row.user_synth_weighted,
                  row.views_transmitted, row.infeasible ? 1 : 0, row.wall_ms);
    return buf;
}

namespace {

struct SweepPoint {
    int index;  // stable stream index of the point
    int K;
    double gamma;
    char axis;  // 'k', 'g' or '-' (no sweep)
};

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
    std::vector<SweepPoint> pts;
    int idx = 0;
    if (cfg.sweep_k.empty() && cfg.sweep_gamma.empty()) {
        pts.push_back({idx++, cfg.K, cfg.zipf_gamma, '-'});
        return pts;
    }
    for (int k : cfg.sweep_k) pts.push_back({idx++, k, cfg.zipf_gamma, 'k'});
    for (double g : cfg.sweep_gamma) pts.push_back({idx++, cfg.K, g, 'g'});
    return pts;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const ViewLattice lattice = build_lattice(cfg.V, cfg.Q);
    const auto points = sweep_points(cfg);
    ExperimentResult result;
    result.csv_path = cfg.output;

    for (const auto& pt : points) {
        SystemParams params = params_for(cfg, pt.K);
        const MeanChannel mean = mean_channel_of(cfg, pt.K);
        std::vector<double> means = mean.Hbar;

        // One channel pool per sweep point (the matrix shape depends on K);
        // the pool is shared by every scheme and request realization.
        std::vector<ChannelState> channels(cfg.n_channel_realizations);
        parallel_for(cfg.n_channel_realizations, [&](int c) {
            RngStream rng(cfg.seed, RngPurpose::channel, static_cast<uint64_t>(c));
            channels[c] = sample_channel(rng, params, means);
        });

        for (int r = 0; r < cfg.n_request_realizations; ++r) {
            RngStream req_rng(cfg.seed, RngPurpose::requests, static_cast<uint64_t>(r));
            const std::vector<int> requests =
                sample_requests(req_rng, pt.K, pt.gamma, lattice,
                                cfg.rank_permutation.empty() ? nullptr : &cfg.rank_permutation);
            for (int k = 0; k < pt.K; ++k) params.users[k].request = requests[k];

            for (const auto& scheme : cfg.schemes) {
                const auto t0 = std::chrono::steady_clock::now();
                ExperimentRow row;
                row.scheme = scheme;
                row.K = pt.K;
                row.gamma = pt.gamma;
                row.realization = r;

                ViewSelection sel;
                bool selected = true;
                try {
                    if (scheme == "algorithm1") {
                        const uint64_t stream_base =
                            (static_cast<uint64_t>(pt.index) << 40) |
                            (static_cast<uint64_t>(r) << 20);
                        // Stationary points are ranked by their true average
                        // weighted energy over the full channel pool (the
                        // approximation alone over-merges multicast groups).
                        const int eval_count = static_cast<int>(channels.size());
                        auto true_energy = [&](const ViewSelection& s) {
                            if (s.num_active_views() > params.N)
                                return std::numeric_limits<double>::infinity();
                            double tx = 0;
                            for (int c = 0; c < eval_count; ++c)
                                tx += solve_slot_allocation(channels[c], s, params).energy;
                            tx /= static_cast<double>(eval_count);
                            return tx + synthesis_energy(s, params, lattice).weighted;
                        };
                        sel = multi_start_select(cfg.dc, params, mean, lattice, cfg.seed,
                                                 stream_base, true_energy).selection;
                    } else if (scheme == "baseline1") {
                        sel = baseline1_selection(requests, lattice);
                    } else {
                        std::vector<double> deltas(pt.K);
                        for (int k = 0; k < pt.K; ++k) deltas[k] = params.users[k].delta;
                        sel = baseline2_selection(requests, deltas, lattice);
                    }
                } catch (const std::exception&) {
                    selected = false;
                }

                if (!selected) {
                    row.infeasible = true;
                } else {
                    const SynthesisEnergy se = synthesis_energy(sel, params, lattice);
                    row.server_synth = se.server;
                    row.user_synth_weighted = params.beta * se.users;
                    row.views_transmitted = sel.num_active_views();
                    if (row.views_transmitted > params.N) {
                        row.infeasible = true;
                    } else {
                        std::vector<double> tx(channels.size(), 0.0);
                        parallel_for(static_cast<int>(channels.size()), [&](int c) {
                            tx[c] = solve_slot_allocation(channels[c], sel, params).energy;
                        });
                        double sum = 0;
                        for (double e : tx) sum += e;
                        row.tx_energy = sum / static_cast<double>(channels.size());
                        row.avg_energy = row.tx_energy + row.server_synth + row.user_synth_weighted;
                    }
                }
                row.wall_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
                result.rows.push_back(std::move(row));
            }
        }
    }

    if (!cfg.output.empty()) {
        std::ofstream out(cfg.output);
        if (!out) throw std::runtime_error("cannot write output file: " + cfg.output);
        out << csv_header() << "\n";
        for (const auto& row : result.rows) out << csv_line(row) << "\n";
    }

    if (cfg.emit_plotdata && !cfg.output.empty()) {
        // Per-scheme series: x is the swept parameter, y the mean avg energy
        // with its standard error over request realizations.
        std::string stem = cfg.output;
        const auto dot = stem.rfind(".csv");
        if (dot != std::string::npos && dot == stem.size() - 4) stem = stem.substr(0, dot);
        for (const auto& scheme : cfg.schemes) {
            std::ofstream out(stem + "_plot_" + scheme + ".csv");
            out << "x,y_mean,y_stderr\n";
            for (const auto& pt : points) {
                double sum = 0, sum2 = 0;
                int n = 0;
                for (const auto& row : result.rows) {
                    if (row.scheme != scheme || row.K != pt.K || row.gamma != pt.gamma ||
                        row.infeasible)
                        continue;
                    sum += row.avg_energy;
                    sum2 += row.avg_energy * row.avg_energy;
                    ++n;
                }
                if (n == 0) continue;
                const double m = sum / n;
                const double var = n > 1 ? std::max(0.0, (sum2 - n * m * m) / (n - 1)) : 0.0;
                char buf[128];
                std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n",
                              pt.axis == 'g' ? pt.gamma : static_cast<double>(pt.K), m,
                              n > 1 ? std::sqrt(var / n) : 0.0);
                out << buf;
            }
        }
    }
    return result;
}

}  // namespace mvv
