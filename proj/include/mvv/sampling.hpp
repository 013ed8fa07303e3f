// sampling.hpp — channel and request draws for the Monte Carlo experiments.
#pragma once

#include <vector>

#include "mvv/channel.hpp"
#include "mvv/lattice.hpp"
#include "mvv/rng.hpp"
#include "mvv/system.hpp"

namespace mvv {

// N x K i.i.d. exponential gains; user k's column has mean channel_means[k]
// (a single entry broadcasts to every user). Row-major draw order (subcarrier
// outer, user inner) is part of the reproducibility contract.
ChannelState sample_channel(RngStream& rng, const SystemParams& params,
                            const std::vector<double>& channel_means);

// Zipf popularity over views: rank i (1-based) gets probability proportional
// to i^-gamma. Ranks map to views in ascending index order unless a
// permutation of lattice positions is supplied.
struct ZipfRequestModel {
    std::vector<double> cumulative;  // unnormalized CDF over ranks
    std::vector<int> rank_to_view;

    ZipfRequestModel(double gamma, const ViewLattice& lattice,
                     const std::vector<int>* rank_permutation = nullptr);

    int draw(RngStream& rng) const;
    // Exact pmf entry for rank i (1-based), for tests.
    double pmf(int rank) const;
};

std::vector<int> sample_requests(RngStream& rng, int K, double gamma, const ViewLattice& lattice,
                                 const std::vector<int>* rank_permutation = nullptr);

}  // namespace mvv
