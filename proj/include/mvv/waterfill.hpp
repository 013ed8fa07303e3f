// waterfill.hpp — per-subcarrier power control primitives.
#pragma once

#include <cstdint>
#include <vector>

#include "mvv/channel.hpp"
#include "mvv/system.hpp"

namespace mvv {

// Power minimizing P - lambda * B * log2(1 + P * gain / n0) over P >= 0:
// the positive part of the water level lambda*B/ln2 minus the inverse gain.
double water_power(double lambda, double gain, const SystemParams& params);

// Rate B * log2(1 + P * gain / n0) achieved by water_power at this level.
double water_rate(double lambda, double gain, const SystemParams& params);

struct WaterFill {
    std::vector<double> powers;
    double lambda = 0;  // common water level meeting the target rate
};

// Minimum-total-power vector delivering exactly rate_target (bits/s) summed
// over the given subcarrier gains. The water level is found by bisection;
// the achieved rate matches rate_target to better than 1e-9 relative.
WaterFill meet_rate_on_subcarriers(const std::vector<double>& gains, double rate_target,
                                   const SystemParams& params);

// Per-subcarrier minimum gain over the multicast group {k : y_col[k] = 1}.
// Throws if the group is empty.
std::vector<double> min_group_channel(const ChannelState& h, const std::vector<uint8_t>& y_col);

}  // namespace mvv
