// rng.hpp — counter-based random streams.
//
// Every random draw in the simulator comes from a stream identified by
// (seed, purpose, stream index). Draw c of a stream is a pure function of
// those four integers, so parallel execution cannot reorder or split draws.
//
// The generator is the SplitMix64 finalizer chain (documented here so other
// implementations can reproduce byte-identical output):
//   mix(x): x += 0x9E3779B97F4A7C15
//           x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9
//           x = (x ^ (x >> 27)) * 0x94D049BB133111EB
//           return x ^ (x >> 31)
//   stream_key(seed, purpose, index) = mix(mix(mix(seed) ^ purpose) ^ index)
//   draw(c)     = mix(stream_key + (c+1) * 0x9E3779B97F4A7C15)
//   uniform01   = ((draw >> 11) + 0.5) * 2^-53            (open interval (0,1))
//   exponential = -mean * ln(uniform01)
#pragma once

#include <cmath>
#include <cstdint>

namespace mvv {

enum class RngPurpose : uint64_t {
    channel = 1,
    requests = 2,
    dc_start = 3,
    test = 99,
};

namespace detail {
inline uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}
}  // namespace detail

class RngStream {
  public:
    RngStream(uint64_t seed, RngPurpose purpose, uint64_t index)
        : key_(detail::mix64(detail::mix64(detail::mix64(seed) ^ static_cast<uint64_t>(purpose)) ^
                             index)) {}

    uint64_t next_u64() { return detail::mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ull); }

    // Strictly inside (0,1) so logarithms are finite.
    double uniform01() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double exponential(double mean) { return -mean * std::log(uniform01()); }

    // Uniform integer in [0, n), n >= 1, by 128-bit multiply-shift.
    uint64_t below(uint64_t n) {
        return static_cast<uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

  private:
    uint64_t key_;
    uint64_t counter_ = 0;
};

}  // namespace mvv
