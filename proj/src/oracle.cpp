// oracle.cpp
#include "mvv/oracle.hpp"

#include <limits>
#include <stdexcept>

#include "mvv/slot_alloc.hpp"

namespace mvv {

std::vector<ViewSelection> enumerate_feasible_selections(const std::vector<int>& requests,
                                                         const std::vector<double>& deltas,
                                                         const ViewLattice& lattice) {
    if (requests.size() != deltas.size())
        throw std::invalid_argument("enumerate_feasible_selections: requests/deltas mismatch");
    const int K = static_cast<int>(requests.size());

    // Per user: option 0 is direct reception, then every (left, right) pair.
    struct Options {
        int request;
        std::vector<std::pair<int, int>> pairs;
    };
    std::vector<Options> opts(K);
    double total = 1;
    for (int k = 0; k < K; ++k) {
        opts[k].request = requests[k];
        const auto nb = synthesis_neighborhoods(requests[k], deltas[k], lattice);
        for (int a : nb.left)
            for (int b : nb.right) opts[k].pairs.emplace_back(a, b);
        total *= 1.0 + static_cast<double>(opts[k].pairs.size());
        if (total > 1e6)
            throw std::invalid_argument("enumerate_feasible_selections: instance above guard");
    }

    std::vector<ViewSelection> out;
    out.reserve(static_cast<size_t>(total));
    std::vector<int> choice(K, 0);  // 0 = direct, i >= 1 = pairs[i-1]
    while (true) {
        Mat<uint8_t> y(K, lattice.size(), 0);
        for (int k = 0; k < K; ++k) {
            if (choice[k] == 0) {
                y(k, opts[k].request) = 1;
            } else {
                const auto& pr = opts[k].pairs[choice[k] - 1];
                y(k, pr.first) = 1;
                y(k, pr.second) = 1;
            }
        }
        out.emplace_back(std::move(y));
        int k = 0;
        while (k < K && ++choice[k] > static_cast<int>(opts[k].pairs.size())) choice[k++] = 0;
        if (k == K) break;
    }
    return out;
}

OracleResult brute_force_optimum(const std::vector<int>& requests, const std::vector<double>& deltas,
                                 const SystemParams& params, const ViewLattice& lattice,
                                 const std::vector<ChannelState>& channel_samples) {
    const auto selections = enumerate_feasible_selections(requests, deltas, lattice);

    OracleResult result;
    result.selections_tried = static_cast<int>(selections.size());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& sel : selections) {
        const SynthesisEnergy se = synthesis_energy(sel, params, lattice);
        double tx = 0;
        for (const auto& h : channel_samples)
            tx += enumerate_assignment_allocation(h, sel, params).energy;
        if (!channel_samples.empty()) tx /= static_cast<double>(channel_samples.size());
        const double total = tx + se.weighted;
        if (total < best) {
            best = total;
            result.best = sel;
            result.energy = total;
        }
    }
    if (selections.empty()) throw std::invalid_argument("brute_force_optimum: no selections");
    return result;
}

}  // namespace mvv
