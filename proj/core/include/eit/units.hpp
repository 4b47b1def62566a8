#pragma once

#include <numbers>

namespace eit {

// Unit conventions used throughout:
//   - user-facing frequencies are in units of 2*pi MHz (the values quoted in
//     configs and reports),
//   - matrices and integrator-facing rates are angular, rad/us,
//   - times are us.
// to_angular / from_angular convert between the two.

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double to_angular(double f_mhz) { return two_pi * f_mhz; }
inline constexpr double from_angular(double w_rad_per_us) { return w_rad_per_us / two_pi; }

}  // namespace eit
