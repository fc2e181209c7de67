#pragma once

#include <numbers>

namespace rydnoise::consts {

// CODATA 2018 (h, k_B, c, e exact by SI definition).
inline constexpr double h = 6.62607015e-34;
inline constexpr double hbar = h / (2.0 * std::numbers::pi);
inline constexpr double k_B = 1.380649e-23;
inline constexpr double c = 299792458.0;
inline constexpr double eps0 = 8.8541878128e-12;
inline constexpr double mu0 = 1.25663706212e-6;
inline constexpr double e = 1.602176634e-19;
inline constexpr double a0 = 5.29177210903e-11;
inline constexpr double amu = 1.66053906660e-27;
inline constexpr double alpha_fs = 7.2973525693e-3;
inline constexpr double eta0 = mu0 * c;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace rydnoise::consts
