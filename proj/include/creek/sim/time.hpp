#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace creek::sim {

// Virtual time in nanoseconds. Integer time keeps traces bit-identical
// across platforms.
using SimTime = std::int64_t;

inline constexpr SimTime kTimeInfinity = std::numeric_limits<SimTime>::max();

inline SimTime from_ms(double ms) { return static_cast<SimTime>(std::llround(ms * 1e6)); }

inline constexpr double to_ms(SimTime t) { return static_cast<double>(t) / 1e6; }

}  // namespace creek::sim
