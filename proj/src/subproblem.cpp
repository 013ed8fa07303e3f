// subproblem.cpp — convex subproblem of the DC iteration, solved by a primal
// log-barrier interior method on the epigraph reformulation.
//
// Variables: the free utilization entries y_{k,v} (users whose request sits
// at a lattice boundary or whose radius admits no anchors are pinned to
// direct reception and eliminated), per-supported-view subcarrier shares L_v
// and transmission epigraph values t_v, and per-synthetic-view dominance
// values s_v standing in for max_k y_{k,v}. All constraints are linear except
// the perspective epigraphs t_v >= psi_k(y_{k,v}, L_v), which are smooth and
// convex; the equalities are the per-user anchor equations.
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "dense_solve.hpp"
#include "mvv/dc_select.hpp"
#include "mvv/perspective.hpp"

namespace mvv {

namespace {

struct PsiCon {
    PerspectiveRatePower f;
    int y_var;       // -1 when the utilization is pinned (then y_value holds it)
    double y_value;  // used when y_var < 0
    int L_var;
    int t_var;
    int view;
};

struct LinCon {
    std::vector<std::pair<int, double>> a;  // a^T z <= b
    double b;
};

struct Layout {
    int n = 0;
    std::vector<double> c;
    double c0 = 0;

    std::vector<std::vector<std::pair<int, double>>> eq;
    std::vector<double> eq_b;
    std::vector<PsiCon> psi;
    std::vector<LinCon> lin;

    struct VarPair {
        int k, v, z;
    };
    std::vector<VarPair> y_vars;
    std::vector<int> fixed_direct;  // users pinned to direct reception
    std::vector<int> sup_views;     // supported lattice positions
    std::vector<int> L_of_view, t_of_view, s_of_view;

    int constraint_count() const { return static_cast<int>(psi.size() + lin.size()); }
};

Layout build_layout(const Mat<double>& anchor_y, double rho, const SystemParams& params,
                    const MeanChannel& mean, const ViewLattice& lattice, double l_floor) {
    const int K = params.K();
    const int S = lattice.size();
    Layout lay;

    std::vector<std::vector<int>> left(K), right(K);
    std::vector<bool> fixed(K, false);
    std::vector<std::vector<int>> var_users_at(S);
    std::vector<int> fixed_ones_at(S, 0);
    for (int k = 0; k < K; ++k) {
        const auto& u = params.users[k];
        auto nb = synthesis_neighborhoods(u.request, u.delta, lattice);
        fixed[k] = nb.left.empty() || nb.right.empty();
        if (fixed[k]) {
            lay.fixed_direct.push_back(k);
            ++fixed_ones_at[u.request];
            continue;
        }
        left[k] = std::move(nb.left);
        right[k] = std::move(nb.right);
        var_users_at[u.request].push_back(k);
        for (int v : left[k]) var_users_at[v].push_back(k);
        for (int v : right[k]) var_users_at[v].push_back(k);
    }

    for (int v = 0; v < S; ++v)
        if (!var_users_at[v].empty() || fixed_ones_at[v] > 0) lay.sup_views.push_back(v);

    Mat<int> y_index(K, S, -1);
    int next = 0;
    for (int k = 0; k < K; ++k) {
        if (fixed[k]) continue;
        auto add = [&](int v) {
            y_index(k, v) = next;
            lay.y_vars.push_back({k, v, next});
            ++next;
        };
        add(params.users[k].request);
        for (int v : left[k]) add(v);
        for (int v : right[k]) add(v);
    }
    lay.L_of_view.assign(S, -1);
    lay.t_of_view.assign(S, -1);
    lay.s_of_view.assign(S, -1);
    for (int v : lay.sup_views) lay.L_of_view[v] = next++;
    for (int v : lay.sup_views) lay.t_of_view[v] = next++;
    for (int v : lay.sup_views) {
        if (lattice.is_original(v)) continue;
        if (fixed_ones_at[v] > 0) continue;  // dominance is the constant 1
        if (var_users_at[v].empty()) continue;
        lay.s_of_view[v] = next++;
    }
    lay.n = next;
    lay.c.assign(lay.n, 0.0);

    // Objective: sum(t) + E_b*(pinned synthetic transmissions + sum(s))
    //            + beta*sum_k E_u,k*(1 - y_{k,r_k}) + rho*sum (1-2*anchor)*y + const,
    // with the transmission epigraphs t already carried in Joules.
    for (int v : lay.sup_views) {
        lay.c[lay.t_of_view[v]] += 1.0;
        if (!lattice.is_original(v)) {
            if (fixed_ones_at[v] > 0)
                lay.c0 += params.E_b;
            else if (lay.s_of_view[v] >= 0)
                lay.c[lay.s_of_view[v]] += params.E_b;
        }
    }
    for (int k = 0; k < K; ++k) {
        if (fixed[k]) continue;
        lay.c[y_index(k, params.users[k].request)] -= params.beta * params.users[k].synth_energy;
        lay.c0 += params.beta * params.users[k].synth_energy;
    }
    double lin_const = penalty(anchor_y);
    for (const auto& vp : lay.y_vars) {
        const double a = anchor_y(vp.k, vp.v);
        lay.c[vp.z] += rho * (1.0 - 2.0 * a);
        lin_const -= (1.0 - 2.0 * a) * a;
    }
    lay.c0 += rho * lin_const;

    for (int k = 0; k < K; ++k) {
        if (fixed[k]) continue;
        const int r = params.users[k].request;
        std::vector<std::pair<int, double>> row1{{y_index(k, r), 1.0}};
        for (int v : left[k]) row1.emplace_back(y_index(k, v), 1.0);
        std::vector<std::pair<int, double>> row2{{y_index(k, r), 1.0}};
        for (int v : right[k]) row2.emplace_back(y_index(k, v), 1.0);
        lay.eq.push_back(std::move(row1));
        lay.eq_b.push_back(1.0);
        lay.eq.push_back(std::move(row2));
        lay.eq_b.push_back(1.0);
    }

    const double ratio = params.R / params.B;
    const double joule = params.n0 * params.T;  // epigraph carried in energy units
    for (int v : lay.sup_views) {
        for (int k : var_users_at[v])
            lay.psi.push_back({{joule / mean.Hbar[k], ratio}, y_index(k, v), 0.0,
                               lay.L_of_view[v], lay.t_of_view[v], v});
        if (fixed_ones_at[v] > 0) {
            double worst = std::numeric_limits<double>::infinity();
            for (int k : lay.fixed_direct)
                if (params.users[k].request == v) worst = std::min(worst, mean.Hbar[k]);
            lay.psi.push_back({{joule / worst, ratio}, -1, 1.0, lay.L_of_view[v], lay.t_of_view[v], v});
        }
    }

    for (const auto& vp : lay.y_vars) lay.lin.push_back({{{vp.z, -1.0}}, 0.0});

    const double w = l_floor / K;  // L_v >= w * (sum of utilization at v)
    for (int v : lay.sup_views) {
        LinCon con;
        for (const auto& vp : lay.y_vars)
            if (vp.v == v) con.a.emplace_back(vp.z, w);
        con.a.emplace_back(lay.L_of_view[v], -1.0);
        con.b = -w * fixed_ones_at[v];
        lay.lin.push_back(std::move(con));
    }
    {
        LinCon con;
        con.b = params.N;
        for (int v : lay.sup_views) con.a.emplace_back(lay.L_of_view[v], 1.0);
        lay.lin.push_back(std::move(con));
    }
    for (const auto& vp : lay.y_vars) {
        if (lay.s_of_view[vp.v] < 0) continue;
        lay.lin.push_back({{{vp.z, 1.0}, {lay.s_of_view[vp.v], -1.0}}, 0.0});
    }
    return lay;
}

double psi_value(const PsiCon& pc, const std::vector<double>& z) {
    const double y = pc.y_var >= 0 ? z[pc.y_var] : pc.y_value;
    return pc.f.value(y, z[pc.L_var]);
}

// Barrier value at z for weight tb; sets ok=false outside the domain.
double barrier_value(const Layout& lay, const std::vector<double>& z, double tb, bool& ok) {
    ok = true;
    double val = 0;
    for (int i = 0; i < lay.n; ++i) val += lay.c[i] * z[i];
    val *= tb;
    for (const auto& con : lay.lin) {
        double s = con.b;
        for (const auto& [j, a] : con.a) s -= a * z[j];
        if (!(s > 0)) {
            ok = false;
            return 0;
        }
        val -= std::log(s);
    }
    for (const auto& pc : lay.psi) {
        const double s = z[pc.t_var] - psi_value(pc, z);
        if (!(s > 0) || !std::isfinite(s)) {
            ok = false;
            return 0;
        }
        val -= std::log(s);
    }
    return val;
}

struct BarrierOutcome {
    std::vector<double> z;
    double kkt_residual = 0;
    int newton_steps = 0;
};

BarrierOutcome solve_barrier(const Layout& lay, std::vector<double> z, double tol) {
    const int n = lay.n;
    const int p = static_cast<int>(lay.eq.size());
    const int m = lay.constraint_count();
    const int dim = n + p;

    std::vector<double> grad(n), H(static_cast<size_t>(n) * n);
    std::vector<double> M(static_cast<size_t>(dim) * dim), rhs(dim);
    std::vector<double> znew(n);

    auto objective = [&](const std::vector<double>& zz) {
        double o = lay.c0;
        for (int i = 0; i < n; ++i) o += lay.c[i] * zz[i];
        return o;
    };
    auto eps_abs = [&](double obj) { return tol * std::max(1e-3, std::abs(obj)); };

    double obj_scale = std::abs(lay.c0) + 1e-12;
    for (int i = 0; i < n; ++i) obj_scale += std::abs(lay.c[i] * z[i]);
    const double tb0_gap = std::max(0.1 * obj_scale, eps_abs(objective(z)));
    double tb = m / tb0_gap;
    int steps = 0;
    constexpr int kMaxTotalSteps = 4000;

    for (int stage = 0; stage < 48; ++stage) {
        for (int inner = 0; inner < 100; ++inner) {
            if (steps >= kMaxTotalSteps)
                throw std::runtime_error("convex subproblem: Newton iteration cap exceeded");
            ++steps;

            std::fill(grad.begin(), grad.end(), 0.0);
            std::fill(H.begin(), H.end(), 0.0);
            for (int i = 0; i < n; ++i) grad[i] = tb * lay.c[i];
            for (const auto& con : lay.lin) {
                double s = con.b;
                for (const auto& [j, a] : con.a) s -= a * z[j];
                const double inv = 1.0 / s;
                for (const auto& [j, a] : con.a) {
                    grad[j] += a * inv;
                    for (const auto& [j2, a2] : con.a)
                        H[static_cast<size_t>(j) * n + j2] += a * a2 * inv * inv;
                }
            }
            for (const auto& pc : lay.psi) {
                const double y = pc.y_var >= 0 ? z[pc.y_var] : pc.y_value;
                const double L = z[pc.L_var];
                const double s = z[pc.t_var] - pc.f.value(y, L);
                const double inv = 1.0 / s;
                const auto g = pc.f.gradient(y, L);
                const auto hs = pc.f.hessian(y, L);
                // gradient of the constraint over (y, L, t) is (g.dy, g.dL, -1)
                const int iy = pc.y_var, iL = pc.L_var, it = pc.t_var;
                if (iy >= 0) grad[iy] += g.dy * inv;
                grad[iL] += g.dL * inv;
                grad[it] -= inv;
                auto addH = [&](int a, double va, int b, double vb) {
                    H[static_cast<size_t>(a) * n + b] += va * vb * inv * inv;
                };
                if (iy >= 0) {
                    addH(iy, g.dy, iy, g.dy);
                    addH(iy, g.dy, iL, g.dL);
                    addH(iL, g.dL, iy, g.dy);
                    addH(iy, g.dy, it, -1.0);
                    addH(it, -1.0, iy, g.dy);
                    H[static_cast<size_t>(iy) * n + iy] += hs.dyy * inv;
                    H[static_cast<size_t>(iy) * n + iL] += hs.dyl * inv;
                    H[static_cast<size_t>(iL) * n + iy] += hs.dyl * inv;
                }
                addH(iL, g.dL, iL, g.dL);
                addH(iL, g.dL, it, -1.0);
                addH(it, -1.0, iL, g.dL);
                addH(it, -1.0, it, -1.0);
                H[static_cast<size_t>(iL) * n + iL] += hs.dll * inv;
            }
            double diag_max = 0;
            for (int i = 0; i < n; ++i)
                diag_max = std::max(diag_max, H[static_cast<size_t>(i) * n + i]);
            const double reg = 1e-12 * std::max(diag_max, 1.0);
            for (int i = 0; i < n; ++i) H[static_cast<size_t>(i) * n + i] += reg;

            std::fill(M.begin(), M.end(), 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    M[static_cast<size_t>(i) * dim + j] = H[static_cast<size_t>(i) * n + j];
            for (int r = 0; r < p; ++r) {
                for (const auto& [j, a] : lay.eq[r]) {
                    M[static_cast<size_t>(n + r) * dim + j] = a;
                    M[static_cast<size_t>(j) * dim + n + r] = a;
                }
            }
            for (int i = 0; i < n; ++i) rhs[i] = -grad[i];
            for (int r = 0; r < p; ++r) {
                double res = -lay.eq_b[r];
                for (const auto& [j, a] : lay.eq[r]) res += a * z[j];
                rhs[n + r] = -res;
            }
            if (!detail::lu_solve(M, rhs, dim))
                throw std::runtime_error("convex subproblem: singular KKT system");

            double decrement = 0;
            for (int i = 0; i < n; ++i) decrement -= grad[i] * rhs[i];
            if (decrement <= 1e-9) break;

            // Step length: exact ratio test on linear slacks, then backtracking
            // for the nonlinear domain and an Armijo decrease.
            double alpha = 1.0;
            for (const auto& con : lay.lin) {
                double s = con.b, ds = 0;
                for (const auto& [j, a] : con.a) {
                    s -= a * z[j];
                    ds -= a * rhs[j];
                }
                if (ds < 0) alpha = std::min(alpha, -0.995 * s / ds);
            }
            bool ok = false;
            double phi0 = barrier_value(lay, z, tb, ok);
            double slope = 0;
            for (int i = 0; i < n; ++i) slope += grad[i] * rhs[i];
            double step = alpha;
            bool accepted = false;
            for (int bt = 0; bt < 60 && step >= 1e-14; ++bt) {
                for (int i = 0; i < n; ++i) znew[i] = z[i] + step * rhs[i];
                bool good = false;
                const double phi = barrier_value(lay, znew, tb, good);
                if (good && phi <= phi0 + 0.25 * step * slope) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;  // stalled; move on to the next stage
            for (int i = 0; i < n; ++i) z[i] += step * rhs[i];
        }
        if (static_cast<double>(m) / tb <= eps_abs(objective(z))) break;
        tb *= 30;
    }

    BarrierOutcome out;
    out.z = std::move(z);
    out.newton_steps = steps;
    out.kkt_residual = (static_cast<double>(m) / tb) / std::max(1.0, std::abs(objective(out.z)));
    return out;
}

// Strictly feasible start: blend the anchor toward the analytic center of the
// per-user simplex, spread L with headroom, and set epigraphs above psi.
std::vector<double> initial_point(const Layout& lay, const Mat<double>& anchor_y,
                                  const SystemParams& params, const ViewLattice& lattice,
                                  const std::vector<double>* L_hint) {
    std::vector<double> z(lay.n, 0.0);
    const double theta = 0.05;

    std::vector<std::vector<const Layout::VarPair*>> by_user(params.K());
    for (const auto& vp : lay.y_vars) by_user[vp.k].push_back(&vp);
    for (int k = 0; k < params.K(); ++k) {
        if (by_user[k].empty()) continue;
        const auto& u = params.users[k];
        const auto nb = synthesis_neighborhoods(u.request, u.delta, lattice);
        for (const auto* vp : by_user[k]) {
            double interior;
            if (vp->v == u.request)
                interior = 0.5;
            else if (std::find(nb.left.begin(), nb.left.end(), vp->v) != nb.left.end())
                interior = 0.5 / static_cast<double>(nb.left.size());
            else
                interior = 0.5 / static_cast<double>(nb.right.size());
            z[vp->z] = (1.0 - theta) * anchor_y(vp->k, vp->v) + theta * interior;
        }
    }

    // Keep every initial perspective exponent below ~30 so psi and its
    // gradients start within a sane floating range.
    std::vector<double> l_floor(lattice.size(), 1e-6);
    {
        std::vector<double> ymax(lattice.size(), 0.0);
        for (const auto& vp : lay.y_vars) ymax[vp.v] = std::max(ymax[vp.v], z[vp.z]);
        for (int k : lay.fixed_direct) ymax[params.users[k].request] = 1.0;
        const double kappa = std::numbers::ln2 * params.R / params.B;
        double floor_sum = 0;
        for (int v : lay.sup_views) {
            l_floor[v] = std::max(1e-6, kappa * ymax[v] / 30.0);
            floor_sum += l_floor[v];
        }
        if (floor_sum > 0.9 * params.N)
            throw std::runtime_error(
                "convex subproblem: subcarriers too scarce for the view load");
    }
    const double uniform = 0.9 * params.N / static_cast<double>(lay.sup_views.size());
    double total = 0;
    for (int v : lay.sup_views) {
        double raw = uniform;
        if (L_hint && (*L_hint)[v] > 1e-9) raw = std::min((*L_hint)[v], static_cast<double>(params.N));
        raw = std::max(raw, l_floor[v]);
        z[lay.L_of_view[v]] = raw;
        total += raw;
    }
    if (total > 0.95 * params.N) {
        const double scale = 0.9 * params.N / total;
        for (int v : lay.sup_views)
            z[lay.L_of_view[v]] = std::max(z[lay.L_of_view[v]] * scale, l_floor[v]);
    }

    std::vector<double> max_psi(lattice.size(), 0.0);
    for (const auto& pc : lay.psi) {
        const double y = pc.y_var >= 0 ? z[pc.y_var] : pc.y_value;
        const double val = pc.f.value(y, z[pc.L_var]);
        if (!std::isfinite(val)) {
            const double yy = pc.y_var >= 0 ? z[pc.y_var] : pc.y_value;
            throw std::runtime_error("convex subproblem: initial psi infinite at view " +
                                     std::to_string(pc.view) + " y=" + std::to_string(yy) +
                                     " L=" + std::to_string(z[pc.L_var]));
        }
        max_psi[pc.view] = std::max(max_psi[pc.view], val);
    }
    for (int v : lay.sup_views) z[lay.t_of_view[v]] = 1.5 * max_psi[v] + 1e-6;
    for (const auto& vp : lay.y_vars)
        if (lay.s_of_view[vp.v] >= 0)
            z[lay.s_of_view[vp.v]] = std::max(z[lay.s_of_view[vp.v]], z[vp.z] + 0.25);
    return z;
}

}  // namespace

double DCConfig::effective_rho(const SystemParams& params) const {
    if (rho > 0) return rho;
    double max_eu = 0;
    for (const auto& u : params.users) max_eu = std::max(max_eu, u.synth_energy);
    const double scale = params.E_b + params.beta * max_eu;
    return scale > 0 ? scale : 1e-3;
}

double DCConfig::effective_tol_penalty(int K) const {
    return tol_penalty > 0 ? tol_penalty : 1e-6 * K;
}

SubproblemResult solve_convex_subproblem(const Mat<double>& anchor_y, double rho,
                                         const SystemParams& params, const MeanChannel& mean,
                                         const ViewLattice& lattice, double subproblem_tol,
                                         const std::vector<double>* L_hint, double l_floor) {
    if (anchor_y.rows != params.K() || anchor_y.cols != lattice.size())
        throw std::invalid_argument("solve_convex_subproblem: anchor dimensions mismatch");
    if (static_cast<int>(mean.Hbar.size()) != params.K())
        throw std::invalid_argument("solve_convex_subproblem: mean channel size mismatch");

    const Layout lay = build_layout(anchor_y, rho, params, mean, lattice, l_floor);
    std::vector<double> z0 = initial_point(lay, anchor_y, params, lattice, L_hint);
    BarrierOutcome bo = solve_barrier(lay, std::move(z0), subproblem_tol);

    SubproblemResult res;
    res.kkt_residual = bo.kkt_residual;
    res.newton_steps = bo.newton_steps;
    res.sel.y = Mat<double>(params.K(), lattice.size(), 0.0);
    res.sel.L.assign(lattice.size(), 0.0);
    for (int k : lay.fixed_direct) res.sel.y(k, params.users[k].request) = 1.0;
    for (const auto& vp : lay.y_vars)
        res.sel.y(vp.k, vp.v) = std::clamp(bo.z[vp.z], 0.0, 1.0);
    for (int v : lay.sup_views) res.sel.L[v] = bo.z[lay.L_of_view[v]];

    // Majorization guarantee: never hand back a point whose linearized-penalty
    // objective exceeds the anchor's.
    auto linearized = [&](const ContinuousSelection& cs) {
        double lin = penalty(anchor_y);
        for (const auto& vp : lay.y_vars) {
            const double a = anchor_y(vp.k, vp.v);
            lin += (1.0 - 2.0 * a) * (cs.y(vp.k, vp.v) - a);
        }
        return approx_objective(cs, params, mean, lattice) + rho * lin;
    };
    ContinuousSelection anchor_cs;
    anchor_cs.y = anchor_y;
    anchor_cs.L.assign(lattice.size(), 0.0);
    if (L_hint && L_hint->size() == anchor_cs.L.size() &&
        std::any_of(L_hint->begin(), L_hint->end(), [](double l) { return l > 0; })) {
        anchor_cs.L = *L_hint;
    } else {
        for (int v : lay.sup_views)
            anchor_cs.L[v] = static_cast<double>(params.N) / static_cast<double>(lay.sup_views.size());
    }
    const double anchor_val = linearized(anchor_cs);
    res.objective = linearized(res.sel);
    if (!(res.objective <= anchor_val)) {
        res.sel = anchor_cs;
        res.objective = anchor_val;
    }
    return res;
}

}  // namespace mvv
