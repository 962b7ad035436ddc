#pragma once

#include <numbers>

namespace cqed::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double c = 299792458.0;          // m/s
inline constexpr double h = 6.62607015e-34;       // J s
inline constexpr double k_B = 1.380649e-23;       // J/K
inline constexpr double ppm = 1e-6;

}  // namespace cqed::constants
