// test_dc.cpp — penalty/objective arithmetic, the convex subproblem, the DC
// iteration and multi-start selection against enumeration oracles.
#include "mvv/dc_select.hpp"

#include <cmath>

#include "approx_oracle.hpp"
#include "mvv/oracle.hpp"
#include "mvv/perspective.hpp"
#include "test_util.hpp"

using namespace mvv;

namespace {

SystemParams toy_params(const ViewLattice& l, std::vector<double> requests, double delta,
                        double R_over_B = 8.0) {
    SystemParams p;
    p.B = 312500;
    p.R = R_over_B * p.B;
    p.N = 4;
    p.T = 0.1;
    p.n0 = 1e-9;
    p.E_b = 1e-3;
    p.beta = 2;
    for (double r : requests) p.users.push_back({l.position_of(r), delta, 1e-3});
    return p;
}

MeanChannel uniform_mean(int K, double m = 1e-6) { return {std::vector<double>(K, m)}; }

void test_penalty() {
    Mat<double> y(2, 3, 0.0);
    y(0, 0) = 1;
    y(1, 2) = 1;
    CHECK(penalty(y) == 0.0);
    y(0, 1) = 0.5;
    CHECK_NEAR(penalty(y), 0.25, 1e-15);
    y(0, 1) = 0.25;
    y(1, 0) = 0.25;
    CHECK_NEAR(penalty(y), 0.375, 1e-15);
}

void test_approx_objective() {
    // Direct reception of an original with two subcarriers: the stated value.
    const ViewLattice l = build_lattice(2, 1);
    SystemParams p = toy_params(l, {1.0}, 0.0, 2.0);
    ContinuousSelection cs;
    cs.y = Mat<double>(1, 2, 0.0);
    cs.y(0, 0) = 1.0;
    cs.L = {2.0, 0.0};
    const MeanChannel mean = uniform_mean(1);
    CHECK_REL(approx_objective(cs, p, mean, l), 2e-4, 1e-12);

    // No utilization anywhere: transmission term vanishes (user term remains).
    ContinuousSelection zero;
    zero.y = Mat<double>(1, 2, 0.0);
    zero.L = {1.0, 1.0};
    CHECK_NEAR(approx_objective(zero, p, mean, l), p.beta * 1e-3, 1e-15);

    // Mass without subcarriers is infinitely expensive (perspective limit).
    ContinuousSelection bad;
    bad.y = Mat<double>(1, 2, 0.0);
    bad.y(0, 1) = 0.3;
    bad.L = {4.0, 0.0};
    CHECK(std::isinf(approx_objective(bad, p, mean, l)));
}

void test_perspective_gradients() {
    RngStream rng(3, RngPurpose::test, 40);
    for (int trial = 0; trial < 50; ++trial) {
        PerspectiveRatePower f{1e-10 * (0.5 + rng.uniform01()) * 1e6,
                               1.0 + 11.0 * rng.uniform01()};
        const double y = 0.05 + 0.9 * rng.uniform01();
        const double L = 0.5 + 7.5 * rng.uniform01();
        const auto g = f.gradient(y, L);
        const double hy = 6e-6 * (1.0 + y), hl = 6e-6 * (1.0 + L);
        const double fd_y = (f.value(y + hy, L) - f.value(y - hy, L)) / (2 * hy);
        const double fd_l = (f.value(y, L + hl) - f.value(y, L - hl)) / (2 * hl);
        CHECK_REL(g.dy, fd_y, 1e-6);
        CHECK_REL(g.dL, fd_l, 1e-6);

        const auto hs = f.hessian(y, L);
        const double fd_yy =
            (f.gradient(y + hy, L).dy - f.gradient(y - hy, L).dy) / (2 * hy);
        const double fd_yl =
            (f.gradient(y, L + hl).dy - f.gradient(y, L - hl).dy) / (2 * hl);
        const double fd_ll =
            (f.gradient(y, L + hl).dL - f.gradient(y, L - hl).dL) / (2 * hl);
        CHECK_REL(hs.dyy, fd_yy, 1e-5);
        CHECK_REL(hs.dyl, fd_yl, 1e-5);
        CHECK_REL(hs.dll, fd_ll, 1e-5);

        // Convexity witness: midpoint inequality on random pairs.
        const double y2 = 0.05 + 0.9 * rng.uniform01();
        const double L2 = 0.5 + 7.5 * rng.uniform01();
        const double mid = f.value(0.5 * (y + y2), 0.5 * (L + L2));
        CHECK(mid <= 0.5 * (f.value(y, L) + f.value(y2, L2)) + 1e-9 * (1 + mid));
    }
}

void test_subproblem_fixed_point() {
    // Direct reception of the middle original is the strict optimum; the
    // subproblem anchored there returns the anchor itself.
    const ViewLattice l = build_lattice(3, 1);
    SystemParams p = toy_params(l, {2.0}, 1.0);
    const MeanChannel mean = uniform_mean(1);

    Mat<double> anchor(1, 3, 0.0);
    anchor(0, 1) = 1.0;
    std::vector<double> L{0.0, 4.0, 0.0};
    const auto res = solve_convex_subproblem(anchor, 3e-3, p, mean, l, 1e-9, &L);
    CHECK(res.sel.y(0, 1) == 1.0);
    CHECK(res.sel.y(0, 0) == 0.0 && res.sel.y(0, 2) == 0.0);
}

void test_subproblem_descends() {
    const ViewLattice l = build_lattice(3, 1);
    SystemParams p = toy_params(l, {2.0}, 1.0);
    const MeanChannel mean = uniform_mean(1);

    // Anchor at the anchor-pair vertex: a strictly better point exists.
    Mat<double> anchor(1, 3, 0.0);
    anchor(0, 0) = 1.0;
    anchor(0, 2) = 1.0;
    std::vector<double> L{2.0, 0.0, 2.0};
    ContinuousSelection anchor_cs{anchor, L};
    const double anchor_val =
        approx_objective(anchor_cs, p, mean, l) + 3e-3 * penalty(anchor);
    const auto res = solve_convex_subproblem(anchor, 3e-3, p, mean, l, 1e-9, &L);
    CHECK(res.objective < anchor_val);
    CHECK(res.kkt_residual <= 1e-9);

    // Fractional anchors: the subproblem value never exceeds the anchor's.
    RngStream rng(9, RngPurpose::test, 41);
    for (int trial = 0; trial < 10; ++trial) {
        const double a = rng.uniform01();
        Mat<double> frac(1, 3, 0.0);
        frac(0, 1) = a;
        frac(0, 0) = 1.0 - a;
        frac(0, 2) = 1.0 - a;
        std::vector<double> Lf{1.5, 1.0, 1.5};
        ContinuousSelection fcs{frac, Lf};
        const double fval = approx_objective(fcs, p, mean, l) + 3e-3 * penalty(frac);
        const auto r = solve_convex_subproblem(frac, 3e-3, p, mean, l, 1e-9, &Lf);
        CHECK(r.objective <= fval + 1e-12 * (1 + std::abs(fval)));
    }
}

void test_dc_iterate_basics() {
    const ViewLattice l = build_lattice(3, 1);
    SystemParams p = toy_params(l, {2.0}, 1.0);
    const MeanChannel mean = uniform_mean(1);
    DCConfig cfg;

    // Binary stationary start terminates immediately with zero penalty.
    ContinuousSelection direct;
    direct.y = Mat<double>(1, 3, 0.0);
    direct.y(0, 1) = 1.0;
    direct.L = {0.0, 4.0, 0.0};
    auto run = dc_iterate(direct, cfg, p, mean, l);
    CHECK(run.penalty_ok);
    CHECK(run.final_penalty <= 1e-6);
    CHECK(run.phases.size() == 1);
    CHECK(run.final.y(0, 1) > 0.999999);

    // From the pair vertex the iteration walks to direct reception.
    ContinuousSelection pair;
    pair.y = Mat<double>(1, 3, 0.0);
    pair.y(0, 0) = 1.0;
    pair.y(0, 2) = 1.0;
    pair.L = {2.0, 0.0, 2.0};
    run = dc_iterate(pair, cfg, p, mean, l);
    CHECK(run.penalty_ok);
    CHECK(run.final.y(0, 1) > 0.999999);
    for (const auto& ph : run.phases)
        for (size_t i = 1; i < ph.objective_trace.size(); ++i)
            CHECK(ph.objective_trace[i] <= ph.objective_trace[i - 1]);
}

void test_dc_random_instances() {
    RngStream rng(17, RngPurpose::test, 42);
    const ViewLattice l = build_lattice(2, 2);
    for (int trial = 0; trial < 20; ++trial) {
        const int K = 1 + static_cast<int>(rng.below(3));
        std::vector<double> requests;
        for (int k = 0; k < K; ++k)
            requests.push_back(l.value(static_cast<int>(rng.below(l.size()))));
        SystemParams p = toy_params(l, requests, 1.0);
        const MeanChannel mean = uniform_mean(K);
        DCConfig cfg;

        RngStream start_rng(17, RngPurpose::dc_start, 1000 + trial);
        const ContinuousSelection start = random_feasible_start(p, l, start_rng);
        const auto run = dc_iterate(start, cfg, p, mean, l);
        CHECK(run.penalty_ok);
        for (const auto& ph : run.phases)
            for (size_t i = 1; i < ph.objective_trace.size(); ++i)
                CHECK(ph.objective_trace[i] <= ph.objective_trace[i - 1]);

        const ViewSelection rounded = round_and_repair(run.final, p, mean, l);
        CHECK(validate_selection(rounded, p, l).ok);

        // The terminal binary point is one of the enumerable feasible ones.
        std::vector<int> req(K);
        std::vector<double> deltas(K, 1.0);
        for (int k = 0; k < K; ++k) req[k] = p.users[k].request;
        bool found = false;
        for (const auto& sel : enumerate_feasible_selections(req, deltas, l))
            found = found || sel.y == rounded.y;
        CHECK(found);
    }
}

void test_random_start() {
    const ViewLattice l = build_lattice(3, 2);
    // Boundary request: both neighborhoods cannot complete a pair, so the
    // start is always direct.
    SystemParams p1 = toy_params(l, {1.0}, 1.0);
    RngStream rng(23, RngPurpose::test, 43);
    for (int i = 0; i < 10; ++i) {
        const auto cs = random_feasible_start(p1, l, rng);
        CHECK(cs.y(0, 0) == 1.0);
    }
    // Zero radius: direct for every user.
    SystemParams p2 = toy_params(l, {2.0}, 0.0);
    for (int i = 0; i < 5; ++i) {
        const auto cs = random_feasible_start(p2, l, rng);
        CHECK(cs.y(0, l.position_of(2.0)) == 1.0);
    }
    // Determinism per stream.
    SystemParams p3 = toy_params(l, {2.0, 2.5}, 1.0);
    RngStream a(7, RngPurpose::dc_start, 5), b(7, RngPurpose::dc_start, 5);
    const auto ca = random_feasible_start(p3, l, a);
    const auto cb = random_feasible_start(p3, l, b);
    CHECK(ca.y == cb.y);
    CHECK(ca.L == cb.L);
    // Starts satisfy the selection constraints.
    Mat<uint8_t> bin(p3.K(), l.size(), 0);
    for (int k = 0; k < p3.K(); ++k)
        for (int v = 0; v < l.size(); ++v) bin(k, v) = ca.y(k, v) > 0.5 ? 1 : 0;
    CHECK(validate_selection(ViewSelection(bin), p3, l).ok);
}

void test_round_and_repair() {
    const ViewLattice l = build_lattice(3, 2);
    SystemParams p = toy_params(l, {2.0}, 1.0);
    const MeanChannel mean = uniform_mean(1);

    // Binary input passes through unchanged.
    ContinuousSelection bin;
    bin.y = Mat<double>(1, l.size(), 0.0);
    bin.y(0, l.position_of(2.0)) = 1.0;
    bin.L.assign(l.size(), 0.0);
    bin.L[l.position_of(2.0)] = 4.0;
    const auto same = round_and_repair(bin, p, mean, l);
    CHECK(same.y(0, l.position_of(2.0)) == 1);
    CHECK(same.num_active_views() == 1);

    // Dominant direct mass wins over a light anchor pair.
    ContinuousSelection frac;
    frac.y = Mat<double>(1, l.size(), 0.0);
    frac.y(0, l.position_of(2.0)) = 0.9;
    frac.y(0, l.position_of(1.5)) = 0.1;
    frac.y(0, l.position_of(2.5)) = 0.1;
    frac.L.assign(l.size(), 4.0 / l.size());
    const auto fixed = round_and_repair(frac, p, mean, l);
    CHECK(fixed.y(0, l.position_of(2.0)) == 1);
    CHECK(validate_selection(fixed, p, l).ok);

    // A truncated fractional iterate still repairs to a feasible selection.
    SystemParams p2 = toy_params(l, {2.0, 1.5}, 1.0);
    ContinuousSelection mess;
    mess.y = Mat<double>(2, l.size(), 0.0);
    mess.y(0, l.position_of(1.5)) = 0.55;
    mess.y(0, l.position_of(2.5)) = 0.55;
    mess.y(0, l.position_of(2.0)) = 0.45;
    mess.y(1, l.position_of(1.0)) = 0.6;
    mess.y(1, l.position_of(2.0)) = 0.6;
    mess.y(1, l.position_of(1.5)) = 0.4;
    mess.L.assign(l.size(), 4.0 / l.size());
    const auto repaired = round_and_repair(mess, p2, mean, l);
    CHECK(validate_selection(repaired, p2, l).ok);
}

void test_multi_start() {
    const ViewLattice l = build_lattice(2, 2);
    SystemParams p = toy_params(l, {1.5, 1.5, 2.0}, 1.0);
    const MeanChannel mean = uniform_mean(3);

    // One start reproduces a manual dc_iterate from the same stream.
    DCConfig one;
    one.starts = 1;
    one.include_direct_start = false;
    const auto ms1 = multi_start_select(one, p, mean, l, 99, 0);
    RngStream rng(99, RngPurpose::dc_start, 0);
    const auto start = random_feasible_start(p, l, rng);
    const auto run = dc_iterate(start, one, p, mean, l);
    const auto manual = round_and_repair(run.final, p, mean, l);
    CHECK(ms1.selection.y == manual.y);

    // More starts never increase the achieved objective.
    DCConfig five = one;
    five.starts = 5;
    DCConfig ten = one;
    ten.starts = 10;
    const auto ms5 = multi_start_select(five, p, mean, l, 99, 0);
    const auto ms10 = multi_start_select(ten, p, mean, l, 99, 0);
    CHECK(ms5.objective <= ms1.objective + 1e-12);
    CHECK(ms10.objective <= ms5.objective + 1e-12);
}

void test_multi_start_vs_oracle() {
    // Toy instances: the multi-start DC attains the enumerated optimum of the
    // approximate objective in at least 80% of seeded cases.
    const ViewLattice l = build_lattice(2, 2);
    int hits = 0;
    const int cases = 50;
    for (int seed = 0; seed < cases; ++seed) {
        RngStream rng(seed, RngPurpose::test, 44);
        const int K = 1 + static_cast<int>(rng.below(3));
        std::vector<double> requests;
        for (int k = 0; k < K; ++k)
            requests.push_back(l.value(static_cast<int>(rng.below(l.size()))));
        SystemParams p = toy_params(l, requests, 1.0);
        const MeanChannel mean = uniform_mean(K);

        DCConfig cfg;
        const auto got = multi_start_select(cfg, p, mean, l, seed, 0);
        const auto want = testgen::best_selection_by_enumeration(p, mean, l);
        if (got.objective <= want.objective * (1.0 + 1e-4)) ++hits;
        CHECK(got.objective >= want.objective * (1.0 - 1e-4));  // oracle is the min
    }
    std::printf("multi-start oracle hits: %d/%d\n", hits, cases);
    CHECK(hits >= 40);
}

}  // namespace

int main() {
    test_penalty();
    test_approx_objective();
    test_perspective_gradients();
    test_subproblem_fixed_point();
    test_subproblem_descends();
    test_dc_iterate_basics();
    test_dc_random_instances();
    test_random_start();
    test_round_and_repair();
    test_multi_start();
    test_multi_start_vs_oracle();
    return testutil::summary("test_dc");
}
