// test_oracle.cpp — the brute-force selection enumerator and optimizer.
#include "mvv/oracle.hpp"

#include <algorithm>

#include "instance_gen.hpp"
#include "mvv/slot_alloc.hpp"
#include "test_util.hpp"

using namespace mvv;

namespace {

SystemParams params_for(const ViewLattice& l, const std::vector<int>& requests, double delta,
                        double e_u = 1e-3) {
    SystemParams p;
    p.R = 2.5e6;
    p.B = 312500;
    p.N = 4;
    p.T = 0.1;
    p.n0 = 1e-9;
    p.E_b = 1e-3;
    p.beta = 2;
    for (int r : requests) p.users.push_back({r, delta, e_u});
    return p;
}

void test_enumeration_counts() {
    const ViewLattice l = build_lattice(5, 2);

    // Integer request with a radius below one lattice step: direct only.
    auto sels = enumerate_feasible_selections({l.position_of(3.0)}, {0.4}, l);
    CHECK(sels.size() == 1);
    CHECK(sels[0].y(0, l.position_of(3.0)) == 1);

    // r=3.5, delta=1: two left anchors x two right anchors + direct = 5.
    sels = enumerate_feasible_selections({l.position_of(3.5)}, {1.0}, l);
    CHECK(sels.size() == 5);

    // Independent users multiply.
    sels = enumerate_feasible_selections({l.position_of(3.5), l.position_of(2.5)}, {1.0, 1.0}, l);
    CHECK(sels.size() == 25);

    // Every element feasible, no duplicates.
    SystemParams p = params_for(l, {l.position_of(3.5), l.position_of(2.5)}, 1.0);
    for (size_t i = 0; i < sels.size(); ++i) {
        CHECK(validate_selection(sels[i], p, l).ok);
        for (size_t j = i + 1; j < sels.size(); ++j) CHECK(!(sels[i].y == sels[j].y));
    }
}

void test_brute_force() {
    const ViewLattice l = build_lattice(2, 2);

    // K=1 with an empty-side request: single selection, direct, no user energy.
    SystemParams p1 = params_for(l, {0}, 1.0);
    RngStream rng(5, RngPurpose::test, 50);
    std::vector<ChannelState> samples;
    for (int c = 0; c < 3; ++c) samples.push_back(testgen::random_channel(p1.N, 1, 1e-6, rng));
    auto res = brute_force_optimum({0}, {1.0}, p1, l, samples);
    CHECK(res.selections_tried == 1);
    CHECK(res.best.y(0, 0) == 1);
    double mean_tx = 0;
    for (const auto& h : samples)
        mean_tx += enumerate_assignment_allocation(h, res.best, p1).energy;
    mean_tx /= samples.size();
    CHECK_REL(res.energy, mean_tx, 1e-12);

    // Sample order does not change the optimum or its value.
    SystemParams p2 = params_for(l, {l.position_of(1.5), l.position_of(1.5)}, 1.0);
    std::vector<ChannelState> s2;
    for (int c = 0; c < 4; ++c) s2.push_back(testgen::random_channel(p2.N, 2, 1e-6, rng));
    auto a = brute_force_optimum({l.position_of(1.5), l.position_of(1.5)}, {1.0, 1.0}, p2, l, s2);
    std::reverse(s2.begin(), s2.end());
    auto b = brute_force_optimum({l.position_of(1.5), l.position_of(1.5)}, {1.0, 1.0}, p2, l, s2);
    CHECK(a.best.y == b.best.y);
    CHECK_REL(a.energy, b.energy, 1e-12);

    // With zero synthesis energies and a shared synthetic request, the oracle
    // never does worse than either all-direct or the shared anchor pair.
    SystemParams p3 = params_for(l, {l.position_of(1.5), l.position_of(1.5)}, 1.0, 0.0);
    p3.E_b = 0;
    auto c = brute_force_optimum({l.position_of(1.5), l.position_of(1.5)}, {1.0, 1.0}, p3, l, s2);
    Mat<uint8_t> direct(2, l.size(), 0);
    direct(0, l.position_of(1.5)) = 1;
    direct(1, l.position_of(1.5)) = 1;
    double direct_e = 0;
    for (const auto& h : s2)
        direct_e += enumerate_assignment_allocation(h, ViewSelection(direct), p3).energy;
    direct_e /= s2.size();
    CHECK(c.energy <= direct_e * (1.0 + 1e-12));
}

void test_guard() {
    const ViewLattice l = build_lattice(5, 5);
    // 21 views, delta=2 gives 10x10 pairs per user: 101^4 > 1e6 trips the guard.
    std::vector<int> reqs(4, l.position_of(3.0));
    CHECK_THROWS(enumerate_feasible_selections(reqs, {2.0, 2.0, 2.0, 2.0}, l));
}

}  // namespace

int main() {
    test_enumeration_counts();
    test_brute_force();
    test_guard();
    return testutil::summary("test_oracle");
}
