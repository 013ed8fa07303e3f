// test_selection.cpp — selection validity, induced transmission, synthesis energy.
#include "mvv/selection.hpp"

#include <stdexcept>

#include "mvv/rng.hpp"
#include "test_util.hpp"

using namespace mvv;

namespace {

SystemParams toy_params(const ViewLattice& l, std::vector<int> requests, double delta,
                        double e_u = 1e-3) {
    SystemParams p;
    p.R = 1e6;
    p.B = 312500;
    p.N = 4;
    p.T = 0.1;
    p.n0 = 1e-9;
    p.E_b = 1e-3;
    p.beta = 2;
    for (int r : requests) p.users.push_back({r, delta, e_u});
    p.validate(l);
    return p;
}

void test_validate() {
    const ViewLattice l = build_lattice(5, 2);
    const int r35 = l.position_of(3.5);

    // Direct reception is always valid.
    SystemParams p = toy_params(l, {r35, l.position_of(2.0)}, 1.0);
    Mat<uint8_t> y(2, l.size(), 0);
    y(0, r35) = 1;
    y(1, l.position_of(2.0)) = 1;
    CHECK(validate_selection(ViewSelection(y), p, l).ok);

    // Anchor pair 3 + 4 for request 3.5.
    Mat<uint8_t> y2(2, l.size(), 0);
    y2(0, l.position_of(3.0)) = 1;
    y2(0, l.position_of(4.0)) = 1;
    y2(1, l.position_of(2.0)) = 1;
    CHECK(validate_selection(ViewSelection(y2), p, l).ok);

    // Left anchor only: the right-side equation fails.
    Mat<uint8_t> y3(2, l.size(), 0);
    y3(0, l.position_of(3.0)) = 1;
    y3(1, l.position_of(2.0)) = 1;
    const auto rep = validate_selection(ViewSelection(y3), p, l);
    CHECK(!rep.ok);
    CHECK(rep.violations.size() == 1);
    CHECK(rep.violations[0].constraint == "(4)");
    CHECK(rep.violations[0].user == 0);

    // Utilizing a view outside the radius violates (5) (and the anchor sums).
    Mat<uint8_t> y4(2, l.size(), 0);
    y4(0, r35) = 1;
    y4(0, l.position_of(1.0)) = 1;
    y4(1, l.position_of(2.0)) = 1;
    const auto rep4 = validate_selection(ViewSelection(y4), p, l);
    CHECK(!rep4.ok);
    bool saw5 = false;
    for (const auto& v : rep4.violations) saw5 = saw5 || v.constraint == "(5)";
    CHECK(saw5);

    // Two left anchors plus one right anchor: the left-side equation fails.
    Mat<uint8_t> y5(2, l.size(), 0);
    y5(0, l.position_of(2.5)) = 1;
    y5(0, l.position_of(3.0)) = 1;
    y5(0, l.position_of(4.0)) = 1;
    y5(1, l.position_of(2.0)) = 1;
    const auto rep5 = validate_selection(ViewSelection(y5), p, l);
    CHECK(!rep5.ok);
    CHECK(rep5.violations.size() == 1);
    CHECK(rep5.violations[0].constraint == "(3)");

    // Dimension mismatch throws.
    Mat<uint8_t> bad(1, l.size(), 0);
    bad(0, r35) = 1;
    CHECK_THROWS(validate_selection(ViewSelection(bad), p, l));
}

void test_induced() {
    Mat<uint8_t> y(2, 4, 0);
    y(0, 2) = 1;
    y(1, 2) = 1;
    auto x = induced_transmission(y);
    CHECK(x == std::vector<uint8_t>({0, 0, 1, 0}));

    Mat<uint8_t> zero(3, 4, 0);
    CHECK(induced_transmission(zero) == std::vector<uint8_t>(4, 0));

    Mat<uint8_t> y2(2, 6, 0);
    y2(0, 4) = 1;  // view 3 on a Q=2 lattice
    y2(1, 5) = 1;  // view 3.5
    x = induced_transmission(y2);
    CHECK(x[4] == 1 && x[5] == 1);
    int total = 0;
    for (auto b : x) total += b;
    CHECK(total == 2);

    // Monotone: turning on an extra y entry never clears an x entry.
    RngStream rng(7, RngPurpose::test, 0);
    for (int trial = 0; trial < 50; ++trial) {
        Mat<uint8_t> a(3, 8, 0);
        for (auto& e : a.data) e = rng.below(2);
        auto xa = induced_transmission(a);
        Mat<uint8_t> b = a;
        b.data[rng.below(b.data.size())] = 1;
        auto xb = induced_transmission(b);
        for (size_t i = 0; i < xa.size(); ++i) CHECK(xb[i] >= xa[i]);
    }
}

void test_energy() {
    const ViewLattice l = build_lattice(5, 2);
    const int r35 = l.position_of(3.5);

    // All direct on originals: zero everywhere.
    SystemParams p = toy_params(l, {l.position_of(2.0)}, 1.0);
    Mat<uint8_t> y(1, l.size(), 0);
    y(0, l.position_of(2.0)) = 1;
    auto e = synthesis_energy(ViewSelection(y), p, l);
    CHECK(e.server == 0 && e.users == 0 && e.weighted == 0);

    // Single user synthesizing from originals: user energy only, beta-weighted.
    SystemParams p2 = toy_params(l, {r35}, 1.0);
    Mat<uint8_t> y2(1, l.size(), 0);
    y2(0, l.position_of(3.0)) = 1;
    y2(0, l.position_of(4.0)) = 1;
    e = synthesis_energy(ViewSelection(y2), p2, l);
    CHECK(e.server == 0);
    CHECK_NEAR(e.users, 1e-3, 1e-15);
    CHECK_NEAR(e.weighted, 2e-3, 1e-15);

    // Synthetic view transmitted, user receives it directly: server energy only.
    Mat<uint8_t> y3(1, l.size(), 0);
    y3(0, r35) = 1;
    e = synthesis_energy(ViewSelection(y3), p2, l);
    CHECK_NEAR(e.server, 1e-3, 1e-15);
    CHECK(e.users == 0);
    CHECK_NEAR(e.weighted, 1e-3, 1e-15);
}

}  // namespace

int main() {
    test_validate();
    test_induced();
    test_energy();
    return testutil::summary("test_selection");
}
