// lattice.cpp
#include "mvv/lattice.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mvv {

int ViewLattice::position_of(double r) const {
    const double scaled = (r - 1.0) * Q;
    const double nearest = std::round(scaled);
    if (std::abs(scaled - nearest) > 1e-9) {
        throw std::invalid_argument("view index " + std::to_string(r) + " is not on the 1/" +
                                    std::to_string(Q) + " lattice");
    }
    const int pos = static_cast<int>(nearest);
    if (!contains(pos)) {
        throw std::invalid_argument("view index " + std::to_string(r) + " outside [1, " +
                                    std::to_string(V) + "]");
    }
    return pos;
}

std::string ViewLattice::view_name(int pos) const {
    char buf[32];
    if (is_original(pos)) {
        std::snprintf(buf, sizeof(buf), "%d", 1 + pos / Q);
    } else {
        std::snprintf(buf, sizeof(buf), "%g", value(pos));
    }
    return buf;
}

ViewLattice build_lattice(int V, int Q) {
    if (V < 2) throw std::invalid_argument("lattice requires V >= 2");
    if (Q < 1) throw std::invalid_argument("lattice requires Q >= 1");
    return ViewLattice{V, Q};
}

int delta_steps(double delta, int Q) {
    if (delta < 0) throw std::invalid_argument("delta must be nonnegative");
    // d lattice steps are reachable iff d/Q <= delta. The +1e-9 absorbs the
    // binary representation error of decimal deltas like 0.4 * 5.
    return static_cast<int>(std::floor(delta * Q + 1e-9));
}

SynthesisNeighborhood synthesis_neighborhoods(int pos, double delta, const ViewLattice& lattice) {
    if (!lattice.contains(pos)) throw std::invalid_argument("view position outside lattice");
    const int reach = delta_steps(delta, lattice.Q);
    SynthesisNeighborhood nb;
    for (int q = std::max(0, pos - reach); q < pos; ++q) nb.left.push_back(q);
    for (int q = pos + 1; q <= std::min(lattice.size() - 1, pos + reach); ++q) nb.right.push_back(q);
    return nb;
}

}  // namespace mvv
