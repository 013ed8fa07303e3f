// baselines.hpp — comparison view-selection policies. Both reuse the same
// optimal per-slot power and subcarrier allocation as the main algorithm.
#pragma once

#include <vector>

#include "mvv/lattice.hpp"
#include "mvv/selection.hpp"

namespace mvv {

// Server-side synthesis only: every user receives exactly the view it
// requested; synthetic requests are synthesized at the server and multicast.
// At most K distinct views are transmitted.
ViewSelection baseline1_selection(const std::vector<int>& requests, const ViewLattice& lattice);

// User-side synthesis only: original requests are received directly; a
// synthetic request is synthesized by the user from the nearest original on
// each side. Only original views are ever transmitted. Throws when some
// user's delta is too small to reach both neighboring originals.
ViewSelection baseline2_selection(const std::vector<int>& requests,
                                  const std::vector<double>& deltas, const ViewLattice& lattice);

}  // namespace mvv
