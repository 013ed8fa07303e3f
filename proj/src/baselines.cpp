// baselines.cpp
#include "mvv/baselines.hpp"

#include <stdexcept>
#include <string>

namespace mvv {

ViewSelection baseline1_selection(const std::vector<int>& requests, const ViewLattice& lattice) {
    Mat<uint8_t> y(static_cast<int>(requests.size()), lattice.size(), 0);
    for (size_t k = 0; k < requests.size(); ++k) {
        if (!lattice.contains(requests[k]))
            throw std::invalid_argument("baseline1: request off lattice");
        y(static_cast<int>(k), requests[k]) = 1;
    }
    return ViewSelection(std::move(y));
}

ViewSelection baseline2_selection(const std::vector<int>& requests,
                                  const std::vector<double>& deltas, const ViewLattice& lattice) {
    if (requests.size() != deltas.size())
        throw std::invalid_argument("baseline2: requests/deltas size mismatch");
    Mat<uint8_t> y(static_cast<int>(requests.size()), lattice.size(), 0);
    for (size_t k = 0; k < requests.size(); ++k) {
        const int r = requests[k];
        if (!lattice.contains(r)) throw std::invalid_argument("baseline2: request off lattice");
        if (lattice.is_original(r)) {
            y(static_cast<int>(k), r) = 1;
            continue;
        }
        const int lo = lattice.floor_original(r);
        const int hi = lattice.ceil_original(r);
        const int reach = delta_steps(deltas[k], lattice.Q);
        if (r - lo > reach || hi - r > reach)
            throw std::invalid_argument("baseline2: user " + std::to_string(k) +
                                        " cannot synthesize from the nearest originals (delta too small)");
        y(static_cast<int>(k), lo) = 1;
        y(static_cast<int>(k), hi) = 1;
    }
    return ViewSelection(std::move(y));
}

}  // namespace mvv
