#pragma once

namespace cqed {

// 2019 SI exact values.
inline constexpr double kPlanck = 6.62607015e-34;       // J s
inline constexpr double kBoltzmann = 1.380649e-23;      // J / K
inline constexpr double kSpeedOfLight = 2.99792458e8;   // m / s
inline constexpr double kMu0 = 1.25663706212e-6;        // T m / A
inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace cqed
