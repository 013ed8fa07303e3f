// oracle.hpp — brute-force ground truth for small instances: enumerates the
// feasible view selections and, with the exhaustive-assignment allocator,
// evaluates the exact sample-average weighted energy.
#pragma once

#include <vector>

#include "mvv/channel.hpp"
#include "mvv/selection.hpp"
#include "mvv/system.hpp"

namespace mvv {

// Every binary y satisfying the anchor equations: per user, either direct
// reception or one left anchor paired with one right anchor. Guarded to
// prod_k (1 + |left_k| * |right_k|) <= 10^6 combinations.
std::vector<ViewSelection> enumerate_feasible_selections(const std::vector<int>& requests,
                                                         const std::vector<double>& deltas,
                                                         const ViewLattice& lattice);

struct OracleResult {
    ViewSelection best;
    double energy = 0;       // sample-average weighted energy, Joules per slot
    int selections_tried = 0;
};

// Exact optimum of the sample-average selection problem: minimizes mean
// transmission energy over the channel samples (exhaustive assignments) plus
// the weighted synthesis energy, over all feasible selections.
OracleResult brute_force_optimum(const std::vector<int>& requests, const std::vector<double>& deltas,
                                 const SystemParams& params, const ViewLattice& lattice,
                                 const std::vector<ChannelState>& channel_samples);

}  // namespace mvv
