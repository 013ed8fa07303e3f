// lattice.hpp — view lattice of original and synthesizable view indices.
//
// Views live on the rational grid {1, 1+1/Q, ..., V}. A view is identified by
// its integer position m (0-based), whose rational index is 1 + m/Q. All set
// membership and equality tests run on positions, never on floating indices.
#pragma once

#include <string>
#include <vector>

namespace mvv {

struct ViewLattice {
    int V = 0;  // number of original views
    int Q = 1;  // subdivision: Q-1 synthetic views between adjacent originals

    int size() const { return (V - 1) * Q + 1; }
    bool is_original(int pos) const { return pos % Q == 0; }
    double value(int pos) const { return 1.0 + static_cast<double>(pos) / Q; }
    bool contains(int pos) const { return pos >= 0 && pos < size(); }

    // Exact parse of a rational view index; throws if r is not on the lattice.
    int position_of(double r) const;

    // Position of the nearest original at or below / at or above pos.
    int floor_original(int pos) const { return pos - pos % Q; }
    int ceil_original(int pos) const { return pos % Q == 0 ? pos : pos - pos % Q + Q; }

    std::string view_name(int pos) const;
};

// Views a user can synthesize view `pos` from, split by side. `left` holds
// lattice positions in [pos - delta, pos), `right` positions in (pos, pos + delta],
// both in ascending order.
struct SynthesisNeighborhood {
    std::vector<int> left;
    std::vector<int> right;
};

ViewLattice build_lattice(int V, int Q);

// Number of whole lattice steps covered by a radius delta (in view-index
// units). Decimal deltas that are exact multiples of 1/Q are honored despite
// binary rounding.
int delta_steps(double delta, int Q);

SynthesisNeighborhood synthesis_neighborhoods(int pos, double delta, const ViewLattice& lattice);

}  // namespace mvv
