// dc_select.cpp — penalty, approximate objective, DC iteration, starts,
// rounding and the multi-start driver.
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mvv/dc_select.hpp"
#include "mvv/parallel.hpp"
#include "mvv/perspective.hpp"

namespace mvv {

double penalty(const Mat<double>& y) {
    double p = 0;
    for (double e : y.data) p += e * (1.0 - e);
    return p;
}

double approx_objective(const ContinuousSelection& cs, const SystemParams& params,
                        const MeanChannel& mean, const ViewLattice& lattice) {
    const int K = params.K();
    const int S = lattice.size();
    if (cs.y.rows != K || cs.y.cols != S || static_cast<int>(cs.L.size()) != S)
        throw std::invalid_argument("approx_objective: dimension mismatch");

    const double ratio = params.R / params.B;
    double obj = 0;
    for (int v = 0; v < S; ++v) {
        const double L = cs.L[v];
        double mass = 0;
        for (int k = 0; k < K; ++k) mass = std::max(mass, cs.y(k, v));
        if (L <= 0) {
            if (mass > 0) return std::numeric_limits<double>::infinity();
            continue;
        }
        double worst = 0;
        for (int k = 0; k < K; ++k) {
            const double y = cs.y(k, v);
            if (y <= 0) continue;
            const double cost = std::expm1(std::numbers::ln2 * ratio * y / L) / mean.Hbar[k];
            worst = std::max(worst, cost);
            if (!std::isfinite(worst)) return std::numeric_limits<double>::infinity();
        }
        obj += params.n0 * params.T * L * worst;
        if (!lattice.is_original(v)) obj += params.E_b * mass;
    }
    for (int k = 0; k < K; ++k)
        obj += params.beta * (1.0 - cs.y(k, params.users[k].request)) * params.users[k].synth_energy;
    return obj;
}

ContinuousSelection random_feasible_start(const SystemParams& params, const ViewLattice& lattice,
                                          RngStream& rng) {
    const int K = params.K();
    const int S = lattice.size();
    ContinuousSelection cs;
    cs.y = Mat<double>(K, S, 0.0);
    cs.L.assign(S, 0.0);
    for (int k = 0; k < K; ++k) {
        const auto& u = params.users[k];
        const auto nb = synthesis_neighborhoods(u.request, u.delta, lattice);
        const uint64_t pairs = static_cast<uint64_t>(nb.left.size()) * nb.right.size();
        const uint64_t pick = rng.below(1 + pairs);
        if (pick == 0 || pairs == 0) {
            cs.y(k, u.request) = 1.0;
        } else {
            const uint64_t idx = pick - 1;
            cs.y(k, nb.left[idx / nb.right.size()]) = 1.0;
            cs.y(k, nb.right[idx % nb.right.size()]) = 1.0;
        }
    }
    int active = 0;
    for (int v = 0; v < S; ++v) {
        double mass = 0;
        for (int k = 0; k < K; ++k) mass = std::max(mass, cs.y(k, v));
        if (mass > 0) ++active;
    }
    for (int v = 0; v < S; ++v) {
        double mass = 0;
        for (int k = 0; k < K; ++k) mass = std::max(mass, cs.y(k, v));
        if (mass > 0) cs.L[v] = static_cast<double>(params.N) / active;
    }
    return cs;
}

namespace {

// Proportional subcarrier split: L_v scaled from the view's utilization mass.
std::vector<double> heuristic_split(const Mat<double>& y, const SystemParams& params) {
    std::vector<double> L(y.cols, 0.0);
    double total = 0;
    for (int v = 0; v < y.cols; ++v) {
        double mass = 0;
        for (int k = 0; k < y.rows; ++k) mass = std::max(mass, y(k, v));
        L[v] = mass;
        total += mass;
    }
    if (total > 0)
        for (double& l : L) l *= params.N / total;
    return L;
}

struct UserOptions {
    int request;
    std::vector<std::pair<int, int>> pairs;  // (left, right), lexicographic
};

std::vector<UserOptions> admissible_supports(const SystemParams& params,
                                             const ViewLattice& lattice) {
    std::vector<UserOptions> opts(params.K());
    for (int k = 0; k < params.K(); ++k) {
        const auto& u = params.users[k];
        opts[k].request = u.request;
        const auto nb = synthesis_neighborhoods(u.request, u.delta, lattice);
        for (int a : nb.left)
            for (int b : nb.right) opts[k].pairs.emplace_back(a, b);
    }
    return opts;
}

}  // namespace

ViewSelection round_and_repair(const ContinuousSelection& cs, const SystemParams& params,
                               const MeanChannel& mean, const ViewLattice& lattice) {
    const int K = params.K();
    const int S = lattice.size();
    Mat<double> work = cs.y;
    const auto opts = admissible_supports(params, lattice);

    for (int k = 0; k < K; ++k) {
        const auto& o = opts[k];
        // Candidate 0 is direct reception, then the anchor pairs.
        std::vector<double> masses{work(k, o.request)};
        for (const auto& [l, r] : o.pairs) masses.push_back(work(k, l) + work(k, r));
        const double best = *std::max_element(masses.begin(), masses.end());

        std::vector<int> tied;
        for (size_t i = 0; i < masses.size(); ++i)
            if (masses[i] >= best - 1e-12) tied.push_back(static_cast<int>(i));

        auto apply = [&](Mat<double>& y, int choice) {
            for (int v = 0; v < S; ++v) y(k, v) = 0.0;
            if (choice == 0) {
                y(k, o.request) = 1.0;
            } else {
                y(k, o.pairs[choice - 1].first) = 1.0;
                y(k, o.pairs[choice - 1].second) = 1.0;
            }
        };
        int chosen = tied.front();
        if (tied.size() > 1) {
            double best_obj = std::numeric_limits<double>::infinity();
            for (int cand : tied) {
                Mat<double> trial = work;
                apply(trial, cand);
                ContinuousSelection tcs{trial, heuristic_split(trial, params)};
                const double obj = approx_objective(tcs, params, mean, lattice);
                if (obj < best_obj) {
                    best_obj = obj;
                    chosen = cand;
                }
            }
        }
        apply(work, chosen);
    }

    Mat<uint8_t> y(K, S, 0);
    for (int k = 0; k < K; ++k)
        for (int v = 0; v < S; ++v) y(k, v) = work(k, v) > 0.5 ? 1 : 0;
    return ViewSelection(std::move(y));
}

SplitResult optimal_subcarrier_split(const ViewSelection& sel, const SystemParams& params,
                                     const MeanChannel& mean, const ViewLattice& lattice) {
    const int S = lattice.size();
    SplitResult out;
    out.L.assign(S, 0.0);

    std::vector<int> active;
    std::vector<double> inv_gain;  // 1 / (worst mean gain in the view's group)
    for (int v = 0; v < S; ++v) {
        if (!sel.x[v]) continue;
        double worst = std::numeric_limits<double>::infinity();
        for (int k = 0; k < sel.y.rows; ++k)
            if (sel.y(k, v)) worst = std::min(worst, mean.Hbar[k]);
        active.push_back(v);
        inv_gain.push_back(1.0 / worst);
    }
    const int A = static_cast<int>(active.size());
    if (A == 0) {
        ContinuousSelection cs{to_double(sel.y), out.L};
        out.objective = approx_objective(cs, params, mean, lattice);
        return out;
    }
    if (params.R <= 0) {
        for (int v : active) out.L[v] = static_cast<double>(params.N) / A;
    } else {
        const double b = params.R / params.B;
        const double scale = params.n0 * params.T;
        // d/dL of L*c*(2^(b/L)-1) = c*(expm1(w) - w*e^w), w = b*ln2/L: negative,
        // increasing to 0. Bisect L so the slope matches -nu.
        auto slope = [&](double c, double L) {
            const double w = std::numbers::ln2 * b / L;
            if (w > 700.0) return -std::numeric_limits<double>::max();
            return scale * c * (std::expm1(w) - w * std::exp(w));
        };
        auto L_at = [&](double c, double nu) {
            double lo = b / 1200.0, hi = 64.0 * params.N + 8.0 * b;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (slope(c, mid) < -nu)
                    lo = mid;
                else
                    hi = mid;
            }
            return 0.5 * (lo + hi);
        };
        auto total = [&](double nu) {
            double t = 0;
            for (int i = 0; i < A; ++i) t += L_at(inv_gain[i], nu);
            return t;
        };
        double nu_lo = 1e-18, nu_hi = 1.0;
        for (int it = 0; it < 200 && total(nu_lo) < params.N; ++it) nu_lo *= 0.25;
        for (int it = 0; it < 200 && total(nu_hi) > params.N; ++it) nu_hi *= 4.0;
        for (int it = 0; it < 100; ++it) {
            const double mid = std::sqrt(nu_lo * nu_hi);
            if (total(mid) > params.N)
                nu_lo = mid;
            else
                nu_hi = mid;
        }
        for (int i = 0; i < A; ++i) out.L[active[i]] = L_at(inv_gain[i], nu_hi);
        // Land exactly on the budget.
        double sum = 0;
        for (int i = 0; i < A; ++i) sum += out.L[active[i]];
        for (int i = 0; i < A; ++i) out.L[active[i]] *= params.N / sum;
    }
    ContinuousSelection cs{to_double(sel.y), out.L};
    out.objective = approx_objective(cs, params, mean, lattice);
    return out;
}

DcRunResult dc_iterate(const ContinuousSelection& start, const DCConfig& cfg,
                       const SystemParams& params, const MeanChannel& mean,
                       const ViewLattice& lattice) {
    const double tol_pen = cfg.effective_tol_penalty(params.K());
    double rho = cfg.effective_rho(params);

    DcRunResult run;
    ContinuousSelection cur = start;
    double cur_pen = penalty(cur.y);

    for (int phase = 0; phase <= cfg.max_escalations; ++phase) {
        DcPhase ph;
        ph.rho = rho;
        double cur_obj = approx_objective(cur, params, mean, lattice) + rho * cur_pen;
        ph.objective_trace.push_back(cur_obj);
        const double phase_start_pen = cur_pen;

        for (int it = 0; it < cfg.max_outer; ++it) {
            SubproblemResult sub = solve_convex_subproblem(cur.y, rho, params, mean, lattice,
                                                           cfg.subproblem_tol, &cur.L, cfg.L_floor);
            ++run.subproblem_count;
            const double new_pen = penalty(sub.sel.y);
            const double new_obj = approx_objective(sub.sel, params, mean, lattice) + rho * new_pen;
            if (!(new_obj <= cur_obj)) break;  // no progress; keep the current iterate
            const double decrease = cur_obj - new_obj;
            cur = std::move(sub.sel);
            cur_obj = new_obj;
            cur_pen = new_pen;
            ph.objective_trace.push_back(cur_obj);
            if (decrease <= cfg.tol_obj * std::max(std::abs(cur_obj), 1e-12)) break;
        }
        run.phases.push_back(std::move(ph));

        if (cur_pen <= tol_pen) {
            run.penalty_ok = true;
            break;
        }
        if (phase == cfg.max_escalations) break;
        rho *= cfg.rho_growth;
        // A penalty that refuses to shrink under escalation means the iterate
        // sits at a fractional stationary point; restart the next phase from
        // its rounding, which is feasible and penalty-free.
        if (phase >= 2 && cur_pen > 0.9 * phase_start_pen) {
            const ViewSelection snapped = round_and_repair(cur, params, mean, lattice);
            cur.y = to_double(snapped.y);
            cur.L = heuristic_split(cur.y, params);
            cur_pen = penalty(cur.y);
        }
    }
    run.final = std::move(cur);
    run.final_penalty = cur_pen;
    return run;
}

MultiStartResult multi_start_select(const DCConfig& cfg, const SystemParams& params,
                                    const MeanChannel& mean, const ViewLattice& lattice,
                                    uint64_t seed, uint64_t stream_base,
                                    const std::function<double(const ViewSelection&)>&
                                        candidate_energy) {
    if (cfg.starts < 1) throw std::invalid_argument("multi_start_select: starts must be >= 1");
    const double tol_pen = cfg.effective_tol_penalty(params.K());

    struct Candidate {
        ViewSelection sel;
        double objective = std::numeric_limits<double>::infinity();
    };
    // Random starts, plus (optionally) the all-direct selection: random draws
    // almost never sample every user receiving its request at once, yet that
    // corner is both always feasible and frequently the incumbent to beat.
    const int total_starts = cfg.starts + (cfg.include_direct_start ? 1 : 0);
    std::vector<Candidate> cand(total_starts);

    parallel_for(total_starts, [&](int s) {
        ContinuousSelection start;
        if (s < cfg.starts) {
            RngStream rng(seed, RngPurpose::dc_start, stream_base + static_cast<uint64_t>(s));
            start = random_feasible_start(params, lattice, rng);
        } else {
            start.y = Mat<double>(params.K(), lattice.size(), 0.0);
            for (int k = 0; k < params.K(); ++k) start.y(k, params.users[k].request) = 1.0;
            std::vector<double> mass(lattice.size(), 0.0);
            int active = 0;
            for (int k = 0; k < params.K(); ++k) mass[params.users[k].request] = 1.0;
            for (double m : mass) active += m > 0;
            start.L.assign(lattice.size(), 0.0);
            for (int v = 0; v < lattice.size(); ++v)
                if (mass[v] > 0) start.L[v] = static_cast<double>(params.N) / active;
        }
        const DcRunResult run = dc_iterate(start, cfg, params, mean, lattice);

        ViewSelection binary;
        if (run.penalty_ok && run.final_penalty <= tol_pen) {
            // Near-binary terminal point: snapping is exact.
            Mat<uint8_t> y(run.final.y.rows, run.final.y.cols, 0);
            for (int i = 0; i < run.final.y.rows; ++i)
                for (int j = 0; j < run.final.y.cols; ++j)
                    y(i, j) = run.final.y(i, j) > 0.5 ? 1 : 0;
            binary = ViewSelection(std::move(y));
        } else {
            binary = round_and_repair(run.final, params, mean, lattice);
        }
        cand[s].objective = optimal_subcarrier_split(binary, params, mean, lattice).objective;
        cand[s].sel = std::move(binary);
    });

    MultiStartResult out;
    out.start_objectives.resize(total_starts);
    for (int s = 0; s < total_starts; ++s) out.start_objectives[s] = cand[s].objective;

    if (!candidate_energy) {
        double best = std::numeric_limits<double>::infinity();
        for (int s = 0; s < total_starts; ++s) {
            if (cand[s].objective < best) {
                best = cand[s].objective;
                out.winning_start = s;
            }
        }
        out.selection = std::move(cand[out.winning_start].sel);
        out.objective = best;
        out.candidate_energy = best;
        return out;
    }

    // Under an exact-energy evaluator the plain direct selection also
    // competes as a raw candidate: the DC may walk off it chasing surrogate
    // savings the true channels do not deliver.
    if (cfg.include_direct_start) {
        Mat<uint8_t> y(params.K(), lattice.size(), 0);
        for (int k = 0; k < params.K(); ++k) y(k, params.users[k].request) = 1;
        Candidate direct;
        direct.sel = ViewSelection(std::move(y));
        direct.objective =
            optimal_subcarrier_split(direct.sel, params, mean, lattice).objective;
        cand.push_back(std::move(direct));
    }
    const int n_cand = static_cast<int>(cand.size());

    // Stationary points repeat across starts; evaluate each distinct
    // selection once (first-seen order keeps this deterministic).
    std::vector<int> rep_of(n_cand, -1);
    std::vector<int> distinct;
    for (int s = 0; s < n_cand; ++s) {
        for (int d : distinct)
            if (cand[d].sel.y == cand[s].sel.y) {
                rep_of[s] = d;
                break;
            }
        if (rep_of[s] < 0) {
            rep_of[s] = s;
            distinct.push_back(s);
        }
    }
    std::vector<double> energy(n_cand, std::numeric_limits<double>::infinity());
    parallel_for(static_cast<int>(distinct.size()),
                 [&](int i) { energy[distinct[i]] = candidate_energy(cand[distinct[i]].sel); });

    double best_e = std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n_cand; ++s) {
        const double e = energy[rep_of[s]];
        if (e < best_e || (e == best_e && cand[s].objective < best_obj)) {
            best_e = e;
            best_obj = cand[s].objective;
            out.winning_start = s;
        }
    }
    out.selection = std::move(cand[out.winning_start].sel);
    out.objective = cand[out.winning_start].objective;
    out.candidate_energy = best_e;
    return out;
}

}  // namespace mvv
