#pragma once

#include <cstdint>

namespace twinsim {

// Simulation time is integer nanoseconds; seconds appear only at I/O
// boundaries.
using SimTime = std::int64_t;

inline constexpr SimTime kNanosPerSec = 1'000'000'000;
inline constexpr SimTime kNanosPerMilli = 1'000'000;
inline constexpr SimTime kNanosPerMicro = 1'000;

constexpr SimTime seconds_to_ns(double s) {
  return static_cast<SimTime>(s * 1e9 + (s >= 0 ? 0.5 : -0.5));
}

constexpr double ns_to_seconds(SimTime t) {
  return static_cast<double>(t) / 1e9;
}

}  // namespace twinsim
