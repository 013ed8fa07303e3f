// slot_alloc.cpp
#include "mvv/slot_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mvv {

namespace {

constexpr int kMaxRounds = 64;
constexpr int kPolishIters = 2500;

// Per active view: multicast-min gains and their water thresholds
// t_n = n0*ln2/(B*gain), cached with log2(t_n). For a level lam > t_n,
//   power  = B*(lam - t_n)/ln2,
//   rate   = B*(log2(lam) - log2(t_n)),
//   score  = lam*rate - power   (priced rate minus spent power, >= 0).
struct ActiveView {
    int view = 0;
    std::vector<double> hmin, t, log2t;
};

struct ActiveSet {
    std::vector<ActiveView> views;
    int N = 0;
};

ActiveSet collect_active(const ChannelState& h, const ViewSelection& sel,
                         const SystemParams& params) {
    ActiveSet as;
    as.N = h.subcarriers();
    if (params.R <= 0) return as;
    const double scale = params.n0 * std::numbers::ln2 / params.B;
    for (int v = 0; v < static_cast<int>(sel.x.size()); ++v) {
        if (!sel.x[v]) continue;
        std::vector<uint8_t> col(sel.y.rows);
        for (int k = 0; k < sel.y.rows; ++k) col[k] = sel.y(k, v);
        ActiveView av;
        av.view = v;
        av.hmin = min_group_channel(h, col);
        av.t.resize(as.N);
        av.log2t.resize(as.N);
        for (int n = 0; n < as.N; ++n) {
            av.t[n] = scale / av.hmin[n];
            av.log2t[n] = std::log2(av.t[n]);
        }
        as.views.push_back(std::move(av));
    }
    return as;
}

inline double view_score(const ActiveView& av, int n, double lam, double log2lam, double B) {
    if (lam <= av.t[n]) return 0.0;
    return B * (lam * (log2lam - av.log2t[n]) - (lam - av.t[n]) / std::numbers::ln2);
}

inline double view_rate(const ActiveView& av, int n, double lam, double log2lam, double B) {
    return lam > av.t[n] ? B * (log2lam - av.log2t[n]) : 0.0;
}

struct Assignment {
    std::vector<int> owner;  // index into active views, per subcarrier
    int ties = 0;
};

Assignment assign_by_score(const ActiveSet& as, const std::vector<double>& lambda, double B) {
    const int A = static_cast<int>(as.views.size());
    std::vector<double> log2lam(A);
    for (int i = 0; i < A; ++i) log2lam[i] = std::log2(lambda[i]);
    Assignment a;
    a.owner.assign(as.N, 0);
    for (int n = 0; n < as.N; ++n) {
        double best = -1;
        int who = 0;
        bool tie = false;
        for (int i = 0; i < A; ++i) {
            const double w = view_score(as.views[i], n, lambda[i], log2lam[i], B);
            if (w > best) {
                best = w;
                who = i;
                tie = false;
            } else if (w == best) {
                tie = true;
            }
        }
        a.owner[n] = who;
        if (tie) ++a.ties;
    }
    return a;
}

double dual_value(const ActiveSet& as, const std::vector<double>& lambda,
                  const SystemParams& params) {
    const int A = static_cast<int>(as.views.size());
    std::vector<double> log2lam(A);
    double sum_lambda = 0;
    for (int i = 0; i < A; ++i) {
        log2lam[i] = std::log2(lambda[i]);
        sum_lambda += lambda[i];
    }
    double sum_best = 0;
    for (int n = 0; n < as.N; ++n) {
        double best = 0;
        for (int i = 0; i < A; ++i)
            best = std::max(best, view_score(as.views[i], n, lambda[i], log2lam[i], params.B));
        sum_best += best;
    }
    return params.T * (params.R * sum_lambda - sum_best);
}

struct Evaluated {
    std::vector<double> lambda;
    std::vector<std::vector<double>> power;
    std::vector<std::vector<int>> owned;
    double energy = 0;
    bool feasible = false;
};

Evaluated evaluate_assignment(const ActiveSet& as, const std::vector<int>& owner,
                              const SystemParams& params) {
    const int A = static_cast<int>(as.views.size());
    Evaluated ev;
    ev.owned.assign(A, {});
    for (int n = 0; n < as.N; ++n) ev.owned[owner[n]].push_back(n);
    for (int i = 0; i < A; ++i)
        if (ev.owned[i].empty()) return ev;

    ev.feasible = true;
    ev.lambda.assign(A, 0.0);
    ev.power.assign(A, {});
    double total_power = 0;
    std::vector<double> gains;
    for (int i = 0; i < A; ++i) {
        gains.clear();
        for (int n : ev.owned[i]) gains.push_back(as.views[i].hmin[n]);
        WaterFill wf = meet_rate_on_subcarriers(gains, params.R, params);
        ev.lambda[i] = wf.lambda;
        ev.power[i] = std::move(wf.powers);
        for (double p : ev.power[i]) total_power += p;
    }
    ev.energy = params.T * total_power;
    return ev;
}

// Exact coordinate step: the level of view i is bisected so that the rate it
// collects on the subcarriers it wins (against the other views' frozen
// scores) equals R. The winning set only grows with the level, so the
// collected rate is monotone and the crossing is unique.
double coordinate_level(const ActiveSet& as, const std::vector<double>& lambda, int i,
                        const SystemParams& params) {
    const int A = static_cast<int>(as.views.size());
    std::vector<double> best_other(as.N, 0.0);
    std::vector<int> first_other(as.N, A);
    for (int j = 0; j < A; ++j) {
        if (j == i) continue;
        const double l2 = std::log2(lambda[j]);
        for (int n = 0; n < as.N; ++n) {
            const double w = view_score(as.views[j], n, lambda[j], l2, params.B);
            if (w > best_other[n]) {
                best_other[n] = w;
                first_other[n] = j;
            } else if (w == best_other[n]) {
                first_other[n] = std::min(first_other[n], j);
            }
        }
    }
    const auto rate_at = [&](double lam) {
        const double l2 = std::log2(lam);
        double r = 0;
        for (int n = 0; n < as.N; ++n) {
            const double w = view_score(as.views[i], n, lam, l2, params.B);
            const bool wins = w > best_other[n] || (w == best_other[n] && i < first_other[n]);
            if (wins) r += view_rate(as.views[i], n, lam, l2, params.B);
        }
        return r;
    };

    double lo = *std::min_element(as.views[i].t.begin(), as.views[i].t.end());
    double hi = std::max(lambda[i], 2.0 * lo);
    for (int d = 0; d < 400 && rate_at(hi) < params.R; ++d) hi *= 2;
    if (rate_at(lo) >= params.R) return lo;  // degenerate; keep the floor
    for (int it = 0; it < 90; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = rate_at(mid);
        if (r < params.R)
            lo = mid;
        else
            hi = mid;
        if (std::abs(r - params.R) <= 1e-13 * params.R) break;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return hi;
}

// At the dual optimum the relaxation may time-share contested subcarriers, so
// the score argmax can starve tied views. Primal recovery: hand each starved
// view the subcarrier whose transfer costs the least score margin, taken from
// a view that owns spares.
void make_feasible(const ActiveSet& as, std::vector<int>& owner,
                   const std::vector<double>& lambda, const SystemParams& params) {
    const int A = static_cast<int>(as.views.size());
    std::vector<int> count(A, 0);
    for (int o : owner) ++count[o];
    std::vector<double> log2lam(A);
    for (int i = 0; i < A; ++i) log2lam[i] = std::log2(lambda[i]);
    for (;;) {
        int starved = -1;
        for (int i = 0; i < A; ++i)
            if (count[i] == 0) {
                starved = i;
                break;
            }
        if (starved < 0) return;
        double best_margin = -std::numeric_limits<double>::infinity();
        int best_n = -1;
        for (int n = 0; n < as.N; ++n) {
            const int j = owner[n];
            if (count[j] <= 1) continue;
            const double margin =
                view_score(as.views[starved], n, lambda[starved], log2lam[starved], params.B) -
                view_score(as.views[j], n, lambda[j], log2lam[j], params.B);
            if (margin > best_margin) {
                best_margin = margin;
                best_n = n;
            }
        }
        if (best_n < 0) return;  // cannot happen when A <= N
        --count[owner[best_n]];
        owner[best_n] = starved;
        ++count[starved];
    }
}

// First-improvement local exchange on the assignment: move one subcarrier to
// another view whenever that lowers total energy. Ties between views with
// identical multicast groups leave the score competition blind to the best
// split; this pass settles those deterministically.
void local_exchange(const ActiveSet& as, Evaluated& best, const SystemParams& params) {
    const int A = static_cast<int>(as.views.size());
    if (A < 2) return;
    std::vector<int> owner(as.N);
    for (int i = 0; i < A; ++i)
        for (int n : best.owned[i]) owner[n] = i;

    std::vector<double> view_energy(A, 0.0);
    std::vector<int> count(A, 0);
    auto eval_view = [&](int i) {
        std::vector<double> gains;
        for (int n = 0; n < as.N; ++n)
            if (owner[n] == i) gains.push_back(as.views[i].hmin[n]);
        if (gains.empty()) return std::numeric_limits<double>::infinity();
        const WaterFill wf = meet_rate_on_subcarriers(gains, params.R, params);
        double total = 0;
        for (double p : wf.powers) total += p;
        return params.T * total;
    };
    for (int i = 0; i < A; ++i) {
        view_energy[i] = eval_view(i);
        for (int n = 0; n < as.N; ++n) count[i] += owner[n] == i;
    }

    for (int pass = 0; pass < 100; ++pass) {
        bool improved = false;
        for (int n = 0; n < as.N; ++n) {
            const int i = owner[n];
            if (count[i] <= 1) continue;
            for (int j = 0; j < A; ++j) {
                if (j == i) continue;
                owner[n] = j;
                const double ei = eval_view(i);
                const double ej = eval_view(j);
                const double delta = (ei + ej) - (view_energy[i] + view_energy[j]);
                if (delta < -1e-13 * (view_energy[i] + view_energy[j])) {
                    view_energy[i] = ei;
                    view_energy[j] = ej;
                    --count[i];
                    ++count[j];
                    improved = true;
                    break;
                }
                owner[n] = i;
            }
        }
        // Pairwise swaps cover the tight case where every view owns a single
        // subcarrier and no one-sided move is admissible.
        for (int n1 = 0; n1 < as.N; ++n1) {
            for (int n2 = n1 + 1; n2 < as.N; ++n2) {
                const int i = owner[n1], j = owner[n2];
                if (i == j) continue;
                owner[n1] = j;
                owner[n2] = i;
                const double ei = eval_view(i);
                const double ej = eval_view(j);
                const double delta = (ei + ej) - (view_energy[i] + view_energy[j]);
                if (delta < -1e-13 * (view_energy[i] + view_energy[j])) {
                    view_energy[i] = ei;
                    view_energy[j] = ej;
                    improved = true;
                } else {
                    owner[n1] = i;
                    owner[n2] = j;
                }
            }
        }
        // Exact repartition of a view pair's combined subcarriers (bounded
        // enumeration); escapes two-view valleys that single exchanges cannot
        // cross.
        const int union_cap = A <= 3 ? 12 : 8;
        for (int i = 0; i < A; ++i) {
            for (int j = i + 1; j < A; ++j) {
                std::vector<int> pool;
                for (int n = 0; n < as.N; ++n)
                    if (owner[n] == i || owner[n] == j) pool.push_back(n);
                const int m = static_cast<int>(pool.size());
                if (m < 2 || m > union_cap) continue;
                const double base = view_energy[i] + view_energy[j];
                double best_val = base;
                uint32_t best_mask = 0;
                std::vector<double> gi, gj;
                for (uint32_t mask = 1; mask + 1 < (1u << m); ++mask) {
                    gi.clear();
                    gj.clear();
                    for (int b = 0; b < m; ++b) {
                        if (mask & (1u << b))
                            gi.push_back(as.views[i].hmin[pool[b]]);
                        else
                            gj.push_back(as.views[j].hmin[pool[b]]);
                    }
                    double cost = 0;
                    for (double pw : meet_rate_on_subcarriers(gi, params.R, params).powers)
                        cost += pw;
                    for (double pw : meet_rate_on_subcarriers(gj, params.R, params).powers)
                        cost += pw;
                    cost *= params.T;
                    if (cost < best_val * (1.0 - 1e-13)) {
                        best_val = cost;
                        best_mask = mask;
                    }
                }
                if (best_mask != 0) {
                    count[i] = 0;
                    count[j] = 0;
                    for (int b = 0; b < m; ++b) {
                        owner[pool[b]] = (best_mask & (1u << b)) ? i : j;
                        ++count[(best_mask & (1u << b)) ? i : j];
                    }
                    view_energy[i] = eval_view(i);
                    view_energy[j] = eval_view(j);
                    improved = true;
                }
            }
        }
        if (!improved) break;
    }

    Evaluated redone = evaluate_assignment(as, owner, params);
    if (redone.feasible && redone.energy < best.energy) best = std::move(redone);
}

SlotAllocation finalize(const ActiveSet& as, const Evaluated& ev, const SystemParams& params,
                        int num_views) {
    SlotAllocation out;
    out.assignment = Mat<uint8_t>(as.N, num_views, 0);
    out.power = Mat<double>(as.N, num_views, 0.0);
    out.view_rate.assign(num_views, 0.0);
    out.dual.assign(num_views, 0.0);
    out.energy = ev.energy;
    for (size_t i = 0; i < as.views.size(); ++i) {
        const int v = as.views[i].view;
        out.dual[v] = ev.lambda[i];
        double rate = 0;
        for (size_t j = 0; j < ev.owned[i].size(); ++j) {
            const int n = ev.owned[i][j];
            out.assignment(n, v) = 1;
            out.power(n, v) = ev.power[i][j];
            if (ev.power[i][j] > 0)
                rate += params.B * std::log2(1.0 + ev.power[i][j] * as.views[i].hmin[n] / params.n0);
        }
        out.view_rate[v] = rate;
    }
    return out;
}

SlotAllocation empty_allocation(int N, int num_views) {
    SlotAllocation out;
    out.assignment = Mat<uint8_t>(N, num_views, 0);
    out.power = Mat<double>(N, num_views, 0.0);
    out.view_rate.assign(num_views, 0.0);
    out.dual.assign(num_views, 0.0);
    return out;
}

}  // namespace

SlotAllocation solve_slot_allocation(const ChannelState& h, const ViewSelection& sel,
                                     const SystemParams& params, double tol) {
    h.check_positive();
    const int N = h.subcarriers();
    const int num_views = static_cast<int>(sel.x.size());

    const ActiveSet as = collect_active(h, sel, params);
    const int A = static_cast<int>(as.views.size());
    if (A == 0) return empty_allocation(N, num_views);
    if (A > N)
        throw InfeasibleAllocation("active views (" + std::to_string(A) +
                                   ") exceed subcarriers (" + std::to_string(N) + ")");

    // Start every level as if the view had the whole band to itself.
    std::vector<double> lambda(A);
    for (int i = 0; i < A; ++i)
        lambda[i] = meet_rate_on_subcarriers(as.views[i].hmin, params.R, params).lambda;

    Evaluated best;
    best.energy = std::numeric_limits<double>::infinity();
    double best_dual = -std::numeric_limits<double>::infinity();
    int tie_count = 0;
    std::vector<int> prev_owner;
    bool consistent = false;
    int rounds = 0;

    const auto gap_of = [&](double primal) {
        if (!(best_dual > 0)) return std::numeric_limits<double>::infinity();
        return (primal - best_dual) / best_dual;
    };

    double stall_energy = std::numeric_limits<double>::infinity();
    double stall_dual = -std::numeric_limits<double>::infinity();
    int stall_rounds = 0;

    for (rounds = 1; rounds <= kMaxRounds; ++rounds) {
        // Best-response price rounds cycle on contested subcarriers; geometric
        // damping (growing with the round count) settles them.
        const double damp = rounds <= 3 ? 1.0 : std::max(0.15, 3.0 / rounds);
        double max_move = 0;
        for (int i = 0; i < A; ++i) {
            const double response = coordinate_level(as, lambda, i, params);
            const double next = lambda[i] * std::pow(response / lambda[i], damp);
            max_move = std::max(max_move, std::abs(next - lambda[i]) / std::max(next, 1e-300));
            lambda[i] = next;
        }
        best_dual = std::max(best_dual, dual_value(as, lambda, params));
        Assignment a = assign_by_score(as, lambda, params.B);
        tie_count += a.ties;
        std::vector<int> covered = a.owner;
        make_feasible(as, covered, lambda, params);
        Evaluated ev = evaluate_assignment(as, covered, params);
        if (ev.feasible) {
            best_dual = std::max(best_dual, dual_value(as, ev.lambda, params));
            if (ev.energy < best.energy) best = ev;
            if (a.owner == prev_owner && max_move <= 1e-10 && covered == a.owner) {
                Assignment check = assign_by_score(as, ev.lambda, params.B);
                if (check.owner == a.owner) {
                    consistent = true;
                    break;
                }
            }
            if (gap_of(best.energy) <= tol && a.owner == prev_owner) break;
        }
        prev_owner = std::move(a.owner);

        // Degenerate ties never stabilize the assignment; stop once neither
        // side of the bound has moved for a while and let the polish run.
        if (best.energy < stall_energy * (1.0 - 1e-6) ||
            best_dual > stall_dual + 1e-6 * std::abs(stall_dual)) {
            stall_energy = best.energy;
            stall_dual = best_dual;
            stall_rounds = 0;
        } else if (++stall_rounds >= 12) {
            break;
        }
    }

    if (!consistent && (!best.feasible || gap_of(best.energy) > tol)) {
        // Coordinate rounds stall on the tie ridges of the piecewise-smooth
        // dual; max-normalized subgradient ascent on the log-levels with an
        // adaptive halving step schedule climbs the rest of the way. Primal
        // candidates are recovered from each iterate's argmax assignment.
        double step = 0.4;
        int since_improve = 0;
        for (int t = 1; t <= kPolishIters; ++t) {
            std::vector<double> log2lam(A);
            double sum_lambda = 0;
            for (int i = 0; i < A; ++i) {
                log2lam[i] = std::log2(lambda[i]);
                sum_lambda += lambda[i];
            }
            std::vector<int> winner(N, 0);
            std::vector<double> rate(A, 0.0);
            double sum_best = 0;
            for (int n = 0; n < N; ++n) {
                double bw = -1;
                int who = 0;
                for (int i = 0; i < A; ++i) {
                    const double w = view_score(as.views[i], n, lambda[i], log2lam[i], params.B);
                    if (w > bw) {
                        bw = w;
                        who = i;
                    }
                }
                winner[n] = who;
                sum_best += bw;
                rate[who] += view_rate(as.views[who], n, lambda[who], log2lam[who], params.B);
            }
            const double g = params.T * (params.R * sum_lambda - sum_best);
            if (g > best_dual + 1e-10 * std::abs(best_dual)) {
                best_dual = std::max(best_dual, g);
                since_improve = 0;
            } else if (++since_improve >= 60) {
                step *= 0.5;
                since_improve = 0;
                if (step < 3e-5) break;
            }

            if (t % 4 == 1) {
                std::vector<int> covered = winner;
                make_feasible(as, covered, lambda, params);
                Evaluated ev = evaluate_assignment(as, covered, params);
                if (ev.feasible && ev.energy < best.energy) best = ev;
                if (best.feasible && gap_of(best.energy) <= tol) break;
            }

            double max_grad = 0;
            std::vector<double> grad(A);
            for (int i = 0; i < A; ++i) {
                grad[i] = (params.R - rate[i]) / params.R;
                max_grad = std::max(max_grad, std::abs(grad[i]));
            }
            if (max_grad == 0) break;
            for (int i = 0; i < A; ++i) lambda[i] *= std::exp(step * grad[i] / max_grad);
        }
    }

    if (!best.feasible)
        throw InfeasibleAllocation("no feasible assignment found within the round budget");

    local_exchange(as, best, params);
    SlotAllocation out = finalize(as, best, params, num_views);
    out.sweeps = rounds;
    out.tie_count = tie_count;
    out.dual_bound = best_dual;
    out.gap = gap_of(out.energy);
    out.exact = consistent && out.gap <= tol;
    return out;
}

SlotAllocation enumerate_assignment_allocation(const ChannelState& h, const ViewSelection& sel,
                                               const SystemParams& params) {
    h.check_positive();
    const int N = h.subcarriers();
    const int num_views = static_cast<int>(sel.x.size());
    const ActiveSet as = collect_active(h, sel, params);
    const int A = static_cast<int>(as.views.size());

    if (A == 0) return empty_allocation(N, num_views);
    if (A > N)
        throw InfeasibleAllocation("active views (" + std::to_string(A) +
                                   ") exceed subcarriers (" + std::to_string(N) + ")");
    double count = 1;
    for (int n = 0; n < N; ++n) {
        count *= A;
        if (count > 1e6)
            throw std::invalid_argument("enumerate_assignment_allocation: instance above guard");
    }

    std::vector<int> owner(N, 0);
    Evaluated best;
    best.energy = std::numeric_limits<double>::infinity();
    while (true) {
        Evaluated ev = evaluate_assignment(as, owner, params);
        if (ev.feasible && ev.energy < best.energy) best = ev;
        int pos = 0;  // mixed-radix increment, subcarrier 0 least significant
        while (pos < N && ++owner[pos] == A) owner[pos++] = 0;
        if (pos == N) break;
    }
    if (!best.feasible) throw InfeasibleAllocation("no assignment covers all active views");

    SlotAllocation out = finalize(as, best, params, num_views);
    out.dual_bound = out.energy;
    out.gap = 0;
    out.exact = true;
    return out;
}

PrimalVariables recover_primal(const SlotAllocation& alloc, const ViewSelection& sel,
                               const SystemParams& params, const ChannelState& h) {
    const int N = alloc.assignment.rows;
    const int S = alloc.assignment.cols;
    PrimalVariables pv;
    pv.p = Mat<double>(N, S, 0.0);
    pv.c = Mat<double>(N, S, 0.0);
    for (int v = 0; v < S; ++v) {
        bool any = false;
        for (int n = 0; n < N && !any; ++n) any = alloc.assignment(n, v);
        if (!any) continue;
        std::vector<uint8_t> col(sel.y.rows);
        for (int k = 0; k < sel.y.rows; ++k) col[k] = sel.y(k, v);
        const std::vector<double> hmin = min_group_channel(h, col);
        for (int n = 0; n < N; ++n) {
            if (!alloc.assignment(n, v)) continue;
            pv.p(n, v) = alloc.power(n, v);
            pv.c(n, v) = params.B * std::log2(1.0 + pv.p(n, v) * hmin[n] / params.n0);
        }
    }
    return pv;
}

}  // namespace mvv
