#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include "constants.hpp"
#include "noisequanta.hpp"
#include "numerics.hpp"

namespace rydnoise {

enum class Forms { Approximate, Exact };

struct HOResonator {
    double f0 = 10e9;       // Hz
    double gamma_i = 0.0;   // rad/s
    double gamma_c = 0.0;   // rad/s
    double tau = 1e-10;     // phase round trip [s]
    double tau_g = 1e-10;   // group round trip [s]
    double K_U = 0.0;       // V m^-1 J^-1/2

    static double rate_from_q(double f0, double Q) { return consts::two_pi * f0 / (2.0 * Q); }
    static double q_from_rate(double f0, double gamma) { return consts::two_pi * f0 / (2.0 * gamma); }

    static HOResonator from_q(double f0, double Q_i, double Q_c, double tau, double tau_g, double K_U) {
        return {f0, rate_from_q(f0, Q_i), rate_from_q(f0, Q_c), tau, tau_g, K_U};
    }

    double omega0() const { return consts::two_pi * f0; }
    double gamma() const { return gamma_i + gamma_c; }
    double tau_ratio() const { return tau_g / tau; }
    double coupling_ratio() const { return gamma_c / gamma_i; }
    bool high_q() const { return gamma() * tau <= 0.1; }

    void validate() const {
        require(f0 > 0.0 && gamma_i > 0.0 && gamma_c > 0.0, "resonator rates must be positive");
        require(tau > 0.0 && tau_g > 0.0, "round-trip delays must be positive");
        require(K_U >= 0.0, "mode constant must be >= 0");
    }
};

struct HOEnvironment {
    double T_A = 0.0;
    double T_p = room_temperature;
    DetectionMode mode = DetectionMode::Heterodyne;
};

inline double lorentzian(double delta_omega, double delta_omega_r) {
    require(delta_omega_r > 0.0, "linewidth must be positive");
    const double x = consts::pi * delta_omega / delta_omega_r;
    return 1.0 / (1.0 + x * x);
}

// Power-equivalent bandwidth of the resonance [rad/s].
inline double resonance_bandwidth(const HOResonator& r) {
    return consts::two_pi * std::sinh(0.5 * r.gamma() * r.tau) / r.tau;
}

inline double cooling_factor(const HOResonator& r, Forms forms = Forms::Approximate) {
    if (forms == Forms::Approximate) return r.gamma_c / r.gamma_i;
    const double gt = r.gamma() * r.tau;
    const double inv = 2.0 * (-std::expm1(-gt)) * std::exp(-0.5 * gt) / (-std::expm1(-2.0 * r.gamma_c * r.tau)) - 1.0;
    return 1.0 / inv;
}

// K^2: squared field at the atoms per unit input PSD [V^2 m^-2 W^-1].
inline double field_per_power_sq(const HOResonator& r, double delta_omega = 0.0, Forms forms = Forms::Approximate) {
    const double hl = lorentzian(delta_omega, resonance_bandwidth(r));
    const double ku2 = r.K_U * r.K_U;
    if (forms == Forms::Approximate) {
        const double g = r.gamma();
        return 2.0 * r.gamma_c / (g * g) * r.tau_ratio() * ku2 * hl;
    }
    const double d = -std::expm1(-r.gamma() * r.tau);
    return r.tau_g * (-std::expm1(-2.0 * r.gamma_c * r.tau)) / (d * d) * ku2 * hl;
}

inline double field_per_sqrt_power(const HOResonator& r, double delta_omega = 0.0, Forms forms = Forms::Approximate) {
    return std::sqrt(field_per_power_sq(r, delta_omega, forms));
}

// Structure field enhancement relative to a gain-G antenna in free space.
inline double field_enhancement(const HOResonator& r, double G = dipole_gain, Forms forms = Forms::Approximate) {
    return field_per_sqrt_power(r, 0.0, forms) / lambda_coeff(r.f0, G);
}

inline double langevin_strength(const HOResonator& r) {
    const double gt = r.gamma() * r.tau;
    const double gct = r.gamma_c * r.tau;
    return std::exp(2.0 * gct) * (2.0 * (-std::expm1(-gt)) * std::exp(-0.5 * gt) - (-std::expm1(-2.0 * gct)));
}

inline double ho_nep(const HOResonator& r, const HOEnvironment& env, double nef0, double delta_omega = 0.0,
                     Forms forms = Forms::Approximate) {
    r.validate();
    const double thA = noise_quantum(r.f0, env.T_A, env.mode);
    const double thp = noise_quantum(r.f0, env.T_p, env.mode);
    const double k2 = field_per_power_sq(r, delta_omega, forms);
    double sensor = 0.0;
    if (nef0 > 0.0) sensor = k2 > 0.0 ? nef0 * nef0 / k2 : std::numeric_limits<double>::infinity();
    return thA + thp / cooling_factor(r, forms) + sensor;
}

// Input-referred NET; ssb halves heterodyne values for comparison with single-band LNAs.
inline double net_from_nep(double nep, DetectionMode mode, bool ssb) {
    const double t = nep / consts::k_B;
    return (ssb && mode == DetectionMode::Heterodyne) ? 0.5 * t : t;
}

inline double ho_net(const HOResonator& r, const HOEnvironment& env, double nef0, double delta_omega = 0.0,
                     Forms forms = Forms::Approximate, bool ssb = false) {
    return net_from_nep(ho_nep(r, env, nef0, delta_omega, forms), env.mode, ssb);
}

inline HOResonator with_coupling(HOResonator r, double gamma_c) {
    r.gamma_c = gamma_c;
    return r;
}

// Closed-form optimum coupling rate; +inf when nef0 = 0 (overcouple as far as possible).
inline double optimal_coupling_closed(const HOResonator& r, const HOEnvironment& env, double nef0,
                                      double delta_omega = 0.0) {
    if (nef0 <= 0.0) return std::numeric_limits<double>::infinity();
    const double thp = noise_quantum(r.f0, env.T_p, env.mode);
    const double hl = lorentzian(delta_omega, resonance_bandwidth(r));
    return r.gamma_i *
           std::sqrt(1.0 + 2.0 * thp * r.tau_ratio() * r.K_U * r.K_U * hl / (r.gamma_i * nef0 * nef0));
}

inline double optimal_coupling(const HOResonator& r, const HOEnvironment& env, double nef0,
                               double delta_omega = 0.0, Forms forms = Forms::Approximate) {
    const double g0 = optimal_coupling_closed(r, env, nef0, delta_omega);
    if (!std::isfinite(g0) || forms == Forms::Approximate) return g0;
    auto f = [&](double lg) { return ho_nep(with_coupling(r, std::exp(lg)), env, nef0, delta_omega, forms); };
    return std::exp(num::minimize(f, std::log(g0 / 3.0), std::log(g0 * 3.0), 1e-6).x);
}

// Equivalent free-space NEF (gain G) of the optimally coupled structure.
inline double optimal_nef(const HOResonator& r, const HOEnvironment& env, double nef0, bool ssb = false,
                          double G = dipole_gain) {
    const auto ro = with_coupling(r, optimal_coupling_closed(r, env, nef0));
    return nef_from_temperature(ho_net(ro, env, nef0, 0.0, Forms::Approximate, ssb), r.f0, G);
}

// Intrinsic NEF below which the resonator stops helping: optimal_nef(nef0) = nef0.
inline double break_even_nef0(const HOResonator& r, const HOEnvironment& env, bool ssb = false,
                              double G = dipole_gain) {
    auto g = [&](double l) {
        const double n0 = std::exp(l);
        return std::log(optimal_nef(r, env, n0, ssb, G) / n0);
    };
    double lo = std::log(1e-15), hi = std::log(1e-3);
    if (!(g(lo) > 0.0 && g(hi) < 0.0)) throw numerical_error("break_even_nef0: no crossing in [1e-15, 1e-3]");
    return std::exp(num::bisect(g, lo, hi, 1e-12));
}

inline std::complex<double> input_reflection(const HOResonator& r, double delta_omega = 0.0) {
    const double C = r.gamma_c / r.gamma_i;
    const double x = delta_omega / r.gamma();  // 2 Q_loaded * fractional detuning
    const std::complex<double> j(0.0, 1.0);
    return ((1.0 - C) / (1.0 + C) + j * x) / (1.0 + j * x);
}

struct StoredEnergySpectra {
    double w_sig;  // per unit input PSD times input_psd [J/Hz]
    double w_th;
    double w_0;
};

// Energy spectral densities at detuning delta_omega. Integrating over delta_omega / 2pi
// gives stored energy; w_th integrates to (tau_g / tau) Theta at equilibrium.
inline StoredEnergySpectra stored_energy_spectra(const HOResonator& r, const HOEnvironment& env, double nef0,
                                                 double input_psd, double delta_omega) {
    const double hl = lorentzian(delta_omega, resonance_bandwidth(r));
    const double d = -std::expm1(-r.gamma() * r.tau);
    const double pre = r.tau_g / (d * d) * hl;
    const double s = -std::expm1(-2.0 * r.gamma_c * r.tau);
    const double thA = noise_quantum(r.f0, env.T_A, env.mode);
    const double thp = noise_quantum(r.f0, env.T_p, env.mode);
    return {pre * s * input_psd,
            pre * (s * thA + std::exp(-2.0 * r.gamma_c * r.tau) * langevin_strength(r) * thp),
            r.K_U > 0.0 ? nef0 * nef0 / (r.K_U * r.K_U) : std::numeric_limits<double>::infinity()};
}

}  // namespace rydnoise
