// system.hpp — scalar system parameters and per-user profiles.
#pragma once

#include <vector>

#include "mvv/lattice.hpp"

namespace mvv {

struct UserProfile {
    int request = 0;          // requested view, lattice position
    double delta = 1.0;       // synthesis radius in view-index units
    double synth_energy = 0;  // E_u,k, Joules per slot when the user synthesizes
};

struct SystemParams {
    double R = 0;   // source rate of every view, bits/s
    double B = 0;   // subcarrier bandwidth, Hz
    int N = 0;      // subcarrier count
    double T = 0;   // slot duration, s
    double n0 = 0;  // noise power per subcarrier, W
    double E_b = 0; // server synthesis energy, Joules per slot per synthetic view
    double beta = 1;  // weight on user synthesis energy, >= 1
    std::vector<UserProfile> users;

    int K() const { return static_cast<int>(users.size()); }

    // Throws std::invalid_argument on any out-of-range field.
    void validate(const ViewLattice& lattice) const;
};

}  // namespace mvv
