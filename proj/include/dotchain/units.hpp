#pragma once

#include <numbers>

namespace dotchain {

/// Reduced Planck constant in meV * ps (CODATA 2018).
inline constexpr double kHbar = 0.6582119569;

inline constexpr double kPi = std::numbers::pi;

/// Internal time unit is the picosecond; configuration and reports use ns.
constexpr double ps_from_ns(double ns) { return ns * 1000.0; }
constexpr double ns_from_ps(double ps) { return ps / 1000.0; }

}  // namespace dotchain
