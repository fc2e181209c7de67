#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "constants.hpp"
#include "homodel.hpp"
#include "noisequanta.hpp"
#include "numerics.hpp"

namespace rydnoise {

using cplx = std::complex<double>;

enum class FieldComponent { Transverse, Longitudinal };

struct WaveguideResonator {
    cplx kappa{0.0, 0.0};  // alpha + i beta [1/m]
    double L = 0.0;        // m
    cplx S22{0.0, 0.0};    // port-side reflection seen from inside
    cplx Gamma_L{-1.0, 0.0};
    double K_W = 0.0;      // V m^-1 W^-1/2
    double T_p = room_temperature;
    double T_L = room_temperature;
    FieldComponent component = FieldComponent::Transverse;

    double alpha() const { return kappa.real(); }
    double beta() const { return kappa.imag(); }
    void validate() const {
        require(alpha() >= 0.0, "attenuation must be >= 0");
        require(L > 0.0, "length must be positive");
        require(std::abs(S22) <= 1.0 + 1e-12 && std::abs(Gamma_L) <= 1.0 + 1e-12, "reflections must be passive");
    }
};

namespace wg_detail {

// Longitudinal field components see both reflections with flipped sign.
inline std::pair<cplx, cplx> reflections(const WaveguideResonator& w) {
    const double s = w.component == FieldComponent::Longitudinal ? -1.0 : 1.0;
    return {s * w.S22, s * w.Gamma_L};
}

inline void check_z(const WaveguideResonator& w, double z) {
    require(z >= -1e-15 * w.L && z <= w.L * (1.0 + 1e-15), "position outside [0, L]");
}

inline cplx resonance_denominator(const WaveguideResonator& w) {
    return 1.0 - w.S22 * w.Gamma_L * std::exp(-2.0 * w.kappa * w.L);
}

// |1 + Gamma_L e^{-2 kappa (L-z)}|^2
inline double standing_wave(const WaveguideResonator& w, double z) {
    const auto [S, G] = reflections(w);
    return std::norm(1.0 + G * std::exp(-2.0 * w.kappa * (w.L - z)));
}

}  // namespace wg_detail

// Coupler reflection of given magnitude with its phase chosen so the line resonates.
inline cplx resonant_S22(double magnitude, cplx kappa, double L, cplx Gamma_L) {
    const double ph = std::arg(Gamma_L * std::exp(cplx(0.0, -2.0 * kappa.imag() * L)));
    return std::polar(magnitude, -ph);
}

inline double psd_signal(const WaveguideResonator& w, double z, double input_psd) {
    w.validate();
    wg_detail::check_z(w, z);
    const auto [S, G] = wg_detail::reflections(w);
    return (1.0 - std::norm(S)) * wg_detail::standing_wave(w, z) /
           (std::exp(2.0 * w.alpha() * z) * std::norm(wg_detail::resonance_denominator(w))) * input_psd;
}

inline double psd_input_thermal(const WaveguideResonator& w, double f, double z, double T_A, DetectionMode mode) {
    return psd_signal(w, z, noise_quantum(f, T_A, mode));
}

inline double psd_load_thermal(const WaveguideResonator& w, double f, double z, DetectionMode mode) {
    WaveguideResonator m = w;
    std::swap(m.S22, m.Gamma_L);
    return psd_signal(m, w.L - z, noise_quantum(f, w.T_L, mode));
}

inline double noise_profile(const WaveguideResonator& w, double z) {
    w.validate();
    wg_detail::check_z(w, z);
    const auto [S, G] = wg_detail::reflections(w);
    const cplx k = w.kappa;
    const double a = w.alpha(), L = w.L;
    const double t1 = std::norm(std::exp(-k * z) + G * std::exp(-2.0 * k * L) * std::exp(k * z)) *
                      (std::expm1(2.0 * a * z) - std::norm(S) * std::expm1(-2.0 * a * z));
    const double t2 = std::norm(std::exp(k * z) + S * std::exp(-k * z)) *
                      (std::exp(-2.0 * a * L) - std::exp(-2.0 * a * z) -
                       std::norm(G) * std::exp(-4.0 * a * L) * (std::exp(2.0 * a * L) - std::exp(2.0 * a * z)));
    return t1 - t2;
}

inline double psd_wall_thermal(const WaveguideResonator& w, double f, double z, DetectionMode mode) {
    return noise_quantum(f, w.T_p, mode) * noise_profile(w, z) / std::norm(wg_detail::resonance_denominator(w));
}

// Field at z due to unit forward (f_plus) and backward (f_minus) waves launched at z_src.
inline std::pair<cplx, cplx> differential_green(const WaveguideResonator& w, double z, double z_src) {
    wg_detail::check_z(w, z);
    wg_detail::check_z(w, z_src);
    const auto [S, G] = wg_detail::reflections(w);
    const cplx k = w.kappa;
    const cplx A = G * std::exp(-2.0 * k * w.L);
    const cplx inv = 1.0 / (1.0 - S * A);
    cplx fp, fm;
    if (z > z_src) {
        fp = std::exp(k * z_src) * (std::exp(-k * z) + A * std::exp(k * z));
        fm = S * std::exp(-k * z_src) * (std::exp(-k * z) + A * std::exp(k * z));
    } else {
        fp = A * std::exp(k * z_src) * (std::exp(k * z) + S * std::exp(-k * z));
        fm = std::exp(-k * z_src) * (std::exp(k * z) + S * std::exp(-k * z));
    }
    return {fp * inv, fm * inv};
}

struct WGNoise {
    double nep;    // W/Hz
    double B;      // load-leak suppression (inf for a perfect reflector)
    double C;      // radiative cooling factor
    double K2;     // V^2 m^-2 W^-1
};

inline WGNoise wg_nep(const WaveguideResonator& w, double f, double z, double T_A, DetectionMode mode, double nef0) {
    w.validate();
    wg_detail::check_z(w, z);
    const auto [S, G] = wg_detail::reflections(w);
    const double a = w.alpha();
    const double inf = std::numeric_limits<double>::infinity();
    const double sw = wg_detail::standing_wave(w, z);
    const double port = 1.0 - std::norm(S);
    const double sig = std::exp(-2.0 * a * z) * port * sw;  // p_sig * |den|^2 / |a1|^2

    const double leak = std::exp(-2.0 * a * w.L) * (1.0 - std::norm(G)) * std::norm(1.0 + S * std::exp(-2.0 * w.kappa * z));
    const double B = leak > 0.0 ? std::exp(-2.0 * a * z) * sig / leak : inf;
    const double fz = noise_profile(w, z);
    const double C = fz > 0.0 ? sig / fz : inf;
    const double K2 = sig / std::norm(wg_detail::resonance_denominator(w)) * w.K_W * w.K_W;

    double nep = noise_quantum(f, T_A, mode);
    if (std::isfinite(B)) nep += noise_quantum(f, w.T_L, mode) / B;
    if (std::isfinite(C)) nep += noise_quantum(f, w.T_p, mode) / C;
    if (nef0 > 0.0) nep += K2 > 0.0 ? nef0 * nef0 / K2 : inf;
    return {nep, B, C, K2};
}

// Round-trip quantities of the line viewed as a single-mode resonator.
struct RoundTrip {
    double tau;
    double tau_g;
    double gamma_i;
    double gamma_c;
};

inline RoundTrip round_trip(const WaveguideResonator& w, double f, const std::function<double(double)>& beta_of_omega) {
    const double om = consts::two_pi * f;
    const double h = 1e-6 * om;
    const double dbdw = (beta_of_omega(om + h) - beta_of_omega(om - h)) / (2.0 * h);
    const double tau = 2.0 * w.beta() * w.L / om;
    const double tau_g = 2.0 * w.L * dbdw;
    const double gi = 2.0 * w.alpha() * w.L / tau;
    const double gc = -std::log(std::abs(w.S22)) / tau;
    return {tau, tau_g, gi, gc};
}

// Harmonic-oscillator view of the line with the atoms at z.
inline HOResonator ho_equivalent(const WaveguideResonator& w, double f, double z,
                                 const std::function<double(double)>& beta_of_omega) {
    const auto rt = round_trip(w, f, beta_of_omega);
    const auto [S, G] = wg_detail::reflections(w);
    const double sw = std::norm(1.0 + G * std::exp(cplx(0.0, -2.0 * w.beta() * (w.L - z))));
    return {f, rt.gamma_i, rt.gamma_c, rt.tau, rt.tau_g, std::sqrt(w.K_W * w.K_W * sw / rt.tau_g)};
}

struct WGFamily {
    WaveguideResonator base;   // S22 magnitude ignored; set per coupling
    double f = 10e9;
    double coupling_min = 1e-6;  // -ln|S22| bounds
    double coupling_max = 10.0;
    double z_min = 0.0;
    double z_max = -1.0;         // < 0 means L
    int z_grid = 1001;

    WaveguideResonator at(double coupling) const {
        WaveguideResonator w = base;
        w.S22 = resonant_S22(std::exp(-coupling), w.kappa, w.L, w.Gamma_L);
        return w;
    }
    double zmax() const { return z_max < 0.0 ? base.L : z_max; }
};

struct PositionOptimum {
    double z;
    double nep;
    bool degenerate;
};

inline PositionOptimum optimal_position(const WaveguideResonator& w, double f, double T_A, DetectionMode mode,
                                        double nef0, double z_lo, double z_hi, int n_grid = 1001) {
    auto nep = [&](double z) { return wg_nep(w, f, z, T_A, mode, nef0).nep; };
    const auto zs = num::linspace(z_lo, z_hi, n_grid);
    std::size_t best = 0;
    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
    std::vector<double> v(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) {
        v[i] = nep(zs[i]);
        if (v[i] < vmin) { vmin = v[i]; best = i; }
        vmax = std::max(vmax, v[i]);
    }
    if (vmax - vmin <= 1e-12 * std::abs(vmin)) return {zs[zs.size() / 2], vmin, true};
    const double a = zs[best == 0 ? 0 : best - 1];
    const double b = zs[std::min(best + 1, zs.size() - 1)];
    auto r = num::minimize(nep, a, b, 1e-10);
    if (r.fx < vmin) return {r.x, r.fx, false};
    return {zs[best], vmin, false};
}

struct WGDesign {
    cplx S22;
    double coupling;  // -ln|S22|
    double z;
    double nep;
    bool degenerate;
};

// Best coupling magnitude and atom position for a family of lines.
inline WGDesign optimal_design(const WGFamily& fam, double T_A, DetectionMode mode, double nef0) {
    require(fam.coupling_min > 0.0 && fam.coupling_max > fam.coupling_min, "bad coupling bounds");
    auto inner = [&](double lu) {
        return optimal_position(fam.at(std::exp(lu)), fam.f, T_A, mode, nef0, fam.z_min, fam.zmax(), fam.z_grid);
    };
    const double la = std::log(fam.coupling_min), lb = std::log(fam.coupling_max);
    // Coarse scan so a boundary optimum is not missed, then Brent inside the best bracket.
    const auto lus = num::linspace(la, lb, 25);
    std::size_t best = 0;
    double vb = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lus.size(); ++i) {
        const double v = inner(lus[i]).nep;
        if (v < vb) { vb = v; best = i; }
    }
    const double a = lus[best == 0 ? 0 : best - 1];
    const double b = lus[std::min(best + 1, lus.size() - 1)];
    auto r = num::minimize([&](double lu) { return inner(lu).nep; }, a, b, 1e-8);
    double lu = r.fx <= vb ? r.x : lus[best];
    const auto p = inner(lu);
    if (!std::isfinite(p.nep)) throw numerical_error("optimal_design: no finite NEP in family");
    const double u = std::exp(lu);
    return {fam.at(u).S22, u, p.z, p.nep, p.degenerate};
}

}  // namespace rydnoise
