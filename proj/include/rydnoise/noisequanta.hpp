#pragma once

#include <cmath>

#include "constants.hpp"
#include "numerics.hpp"

namespace rydnoise {

enum class DetectionMode { Homodyne, Heterodyne };

struct NoiseEnvironment {
    double f_s = 10e9;  // Hz
    double T = 290.0;   // K
    DetectionMode mode = DetectionMode::Heterodyne;
};

inline constexpr double room_temperature = 290.0;
inline constexpr double dipole_gain = 1.5;

inline void check_frequency(double f) {
    require(std::isfinite(f) && f > 0.0, "frequency must be finite and positive");
}

inline double bose_einstein(double f, double T) {
    check_frequency(f);
    require(std::isfinite(T) && T >= 0.0, "temperature must be >= 0");
    if (T == 0.0) return 0.0;
    const double x = consts::h * f / (consts::k_B * T);
    if (x > 700.0) return 0.0;
    return 1.0 / std::expm1(x);
}

// Spectral noise energy per mode: half a quantum per quadrature for homodyne,
// signal plus image band for heterodyne.
inline double noise_quantum(double f, double T, DetectionMode mode) {
    const double n = bose_einstein(f, T);
    const double hf = consts::h * f;
    return mode == DetectionMode::Homodyne ? hf * (0.5 * n + 0.5) : hf * (2.0 * n + 1.0);
}

inline double noise_quantum(const NoiseEnvironment& env) { return noise_quantum(env.f_s, env.T, env.mode); }

// Thermal part only (Theta minus its zero-temperature value).
inline double thermal_quantum(const NoiseEnvironment& env) {
    const double n = bose_einstein(env.f_s, env.T);
    const double hf = consts::h * env.f_s;
    return env.mode == DetectionMode::Homodyne ? 0.5 * hf * n : 2.0 * hf * n;
}

inline double nef_from_quantum(double f, double theta) {
    return std::sqrt(16.0 * consts::pi * f * f * theta / (3.0 * consts::eps0 * std::pow(consts::c, 3)));
}

// Background-limited NEF of a dipole-pattern receiver.
inline double nef_extrinsic(const NoiseEnvironment& env) { return nef_from_quantum(env.f_s, noise_quantum(env)); }

inline double nef_extrinsic_thermal(const NoiseEnvironment& env) {
    return nef_from_quantum(env.f_s, thermal_quantum(env));
}

inline double nef_extrinsic_vacuum(double f, DetectionMode mode) {
    return nef_from_quantum(f, noise_quantum(f, 0.0, mode));
}

inline double lambda_coeff(double f, double G = dipole_gain) {
    check_frequency(f);
    require(std::isfinite(G) && G > 0.0, "antenna gain must be positive");
    return std::sqrt(8.0 * consts::pi * f * f / (consts::eps0 * std::pow(consts::c, 3) * G));
}

inline double nef_from_temperature(double T_e, double f, double G = dipole_gain) {
    require(T_e >= 0.0, "noise temperature must be >= 0");
    return lambda_coeff(f, G) * std::sqrt(consts::k_B * T_e);
}

inline double temperature_from_nef(double nef, double f, double G = dipole_gain) {
    require(nef >= 0.0, "NEF must be >= 0");
    const double l = lambda_coeff(f, G);
    return nef * nef / (l * l * consts::k_B);
}

// Frequency where the thermal part of Theta equals the vacuum part.
inline double quantum_thermal_crossover(double T, DetectionMode mode, double f_lo = 1e9, double f_hi = 100e12) {
    require(T > 0.0, "crossover needs T > 0");
    auto g = [&](double lf) {
        const double f = std::exp(lf);
        return thermal_quantum({f, T, mode}) - noise_quantum(f, 0.0, mode);
    };
    return std::exp(num::bisect(g, std::log(f_lo), std::log(f_hi), 1e-9));
}

}  // namespace rydnoise
