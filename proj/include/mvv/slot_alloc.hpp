// slot_alloc.hpp — per-slot minimum-energy power and subcarrier allocation
// for a fixed view selection, via Lagrangian dual water-filling, plus an
// exhaustive-assignment oracle for small instances.
#pragma once

#include <stdexcept>

#include "mvv/channel.hpp"
#include "mvv/selection.hpp"
#include "mvv/system.hpp"
#include "mvv/waterfill.hpp"

namespace mvv {

class InfeasibleAllocation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SlotAllocation {
    Mat<uint8_t> assignment;        // N x |views|, one-hot rows over active views
    Mat<double> power;              // N x |views|, watts, nonzero only where assigned
    std::vector<double> view_rate;  // achieved bits/s per view
    std::vector<double> dual;       // water level (rate multiplier) per view
    double energy = 0;              // Joules per slot, T * total power
    double dual_bound = 0;          // best Lagrangian lower bound on energy seen
    double gap = 0;                 // (energy - dual_bound) / dual_bound
    int sweeps = 0;
    int tie_count = 0;              // subcarriers whose best score was not unique
    bool exact = false;             // score-consistent fixed point: zero-gap certificate
};

// Dual method: per active view a water level prices its rate constraint; each
// subcarrier goes to the view with the best power-vs-priced-rate score; levels
// are re-solved exactly on the won subcarriers. The loop alternates until the
// assignment is a fixed point (falling back to subgradient ascent on the
// levels if it cycles), then powers are finalized so every active view's rate
// equals R. Throws InfeasibleAllocation when active views outnumber
// subcarriers.
SlotAllocation solve_slot_allocation(const ChannelState& h, const ViewSelection& sel,
                                     const SystemParams& params, double tol = 1e-6);

// Exact optimum by enumerating every assignment of subcarriers to active
// views that gives each active view at least one subcarrier. Guarded to
// (#active)^N <= 10^6.
SlotAllocation enumerate_assignment_allocation(const ChannelState& h, const ViewSelection& sel,
                                               const SystemParams& params);

struct PrimalVariables {
    Mat<double> p;  // per-(subcarrier, view) transmit power
    Mat<double> c;  // per-(subcarrier, view) rate, bits/s
};

// Recovers the original per-(n,v) power and rate variables from the
// aggregated allocation (division by the one-hot assignment indicator).
PrimalVariables recover_primal(const SlotAllocation& alloc, const ViewSelection& sel,
                               const SystemParams& params, const ChannelState& h);

}  // namespace mvv
