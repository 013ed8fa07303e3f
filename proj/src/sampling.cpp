// sampling.cpp
#include "mvv/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mvv {

ChannelState sample_channel(RngStream& rng, const SystemParams& params,
                            const std::vector<double>& channel_means) {
    const int K = params.K();
    if (channel_means.empty()) throw std::invalid_argument("sample_channel: no channel mean");
    for (double m : channel_means)
        if (!(m > 0)) throw std::invalid_argument("sample_channel: channel mean must be > 0");
    if (channel_means.size() != 1 && static_cast<int>(channel_means.size()) != K)
        throw std::invalid_argument("sample_channel: channel mean count must be 1 or K");

    ChannelState cs;
    cs.h = Mat<double>(params.N, K, 0.0);
    for (int n = 0; n < params.N; ++n)
        for (int k = 0; k < K; ++k)
            cs.h(n, k) = rng.exponential(channel_means.size() == 1 ? channel_means[0]
                                                                   : channel_means[k]);
    return cs;
}

ZipfRequestModel::ZipfRequestModel(double gamma, const ViewLattice& lattice,
                                   const std::vector<int>* rank_permutation) {
    if (gamma < 0) throw std::invalid_argument("zipf: gamma must be >= 0");
    const int S = lattice.size();
    if (rank_permutation) {
        if (static_cast<int>(rank_permutation->size()) != S)
            throw std::invalid_argument("zipf: rank permutation size mismatch");
        rank_to_view = *rank_permutation;
        std::vector<bool> seen(S, false);
        for (int v : rank_to_view) {
            if (v < 0 || v >= S || seen[v])
                throw std::invalid_argument("zipf: rank permutation is not a permutation");
            seen[v] = true;
        }
    } else {
        rank_to_view.resize(S);
        for (int i = 0; i < S; ++i) rank_to_view[i] = i;
    }
    cumulative.resize(S);
    double acc = 0;
    for (int i = 0; i < S; ++i) {
        acc += std::pow(static_cast<double>(i + 1), -gamma);
        cumulative[i] = acc;
    }
}

int ZipfRequestModel::draw(RngStream& rng) const {
    const double u = rng.uniform01() * cumulative.back();
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
    const size_t rank = std::min(static_cast<size_t>(it - cumulative.begin()),
                                 cumulative.size() - 1);
    return rank_to_view[rank];
}

double ZipfRequestModel::pmf(int rank) const {
    const double prev = rank > 1 ? cumulative[rank - 2] : 0.0;
    return (cumulative[rank - 1] - prev) / cumulative.back();
}

std::vector<int> sample_requests(RngStream& rng, int K, double gamma, const ViewLattice& lattice,
                                 const std::vector<int>* rank_permutation) {
    const ZipfRequestModel model(gamma, lattice, rank_permutation);
    std::vector<int> requests(K);
    for (int k = 0; k < K; ++k) requests[k] = model.draw(rng);
    return requests;
}

}  // namespace mvv
