#pragma once

#include <numbers>

namespace costas {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;
inline constexpr double kQuarterPi = std::numbers::pi / 4.0;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kInvSqrt2 = 0.70710678118654752440;

/// Hard limiter with sign(0) := +1. Every limiter and data signal in the
/// library goes through this so runs are deterministic at the switching set.
constexpr double limiter_sign(double v) noexcept { return v >= 0.0 ? 1.0 : -1.0; }

}  // namespace costas
