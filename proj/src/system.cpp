// system.cpp
#include "mvv/system.hpp"

#include <stdexcept>
#include <string>

namespace mvv {

void SystemParams::validate(const ViewLattice& lattice) const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw std::invalid_argument("SystemParams: " + what);
    };
    require(R >= 0, "R must be >= 0");
    require(B > 0, "B must be > 0");
    require(N >= 1, "N must be >= 1");
    require(T > 0, "T must be > 0");
    require(n0 > 0, "n0 must be > 0");
    require(E_b >= 0, "E_b must be >= 0");
    require(beta >= 1, "beta must be >= 1");
    require(!users.empty(), "at least one user required");
    for (size_t k = 0; k < users.size(); ++k) {
        const auto& u = users[k];
        require(lattice.contains(u.request), "user " + std::to_string(k) + " request off lattice");
        require(u.delta >= 0, "user " + std::to_string(k) + " delta must be >= 0");
        require(u.synth_energy >= 0, "user " + std::to_string(k) + " synth energy must be >= 0");
    }
}

}  // namespace mvv
