#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "constants.hpp"
#include "numerics.hpp"

namespace rydnoise {

namespace rb85 {
inline constexpr double mass = 84.911789738 * consts::amu;
inline constexpr double abundance = 0.7217;
inline constexpr double d2_wavelength = 780.241209686e-9;
inline constexpr double d2_gamma = consts::two_pi * 6.0666e6;
// <J=1/2 || er || J'=3/2> in units of e a0
inline constexpr double d2_reduced_dipole = 4.227;

// Saturated vapour number density of rubidium (all isotopes) [m^-3].
inline double vapor_density(double T) {
    require(T > 0.0, "temperature must be positive");
    const double log_p_torr = T < 312.46
        ? -94.04826 - 1961.258 / T - 0.03771687 * T + 42.57526 * std::log10(T)
        : 15.88253 - 4529.635 / T + 0.00058663 * T - 2.99138 * std::log10(T);
    return std::pow(10.0, log_p_torr) * 133.322368 / (consts::k_B * T);
}

// Number of Rb85 atoms per m^3 that lie within the homogeneous probe linewidth
// of a Doppler-broadened vapour: the density a Doppler-free model should use to
// reproduce the resonant absorption of the thermal ensemble.
inline double doppler_equivalent_density(double T, double gamma = d2_gamma, double lambda = d2_wavelength) {
    const double sigma_omega = consts::two_pi / lambda * std::sqrt(consts::k_B * T / mass);
    const double fraction = std::sqrt(consts::pi / 2.0) * (0.5 * gamma) / sigma_omega;
    return vapor_density(T) * abundance * std::min(1.0, fraction);
}

inline double mean_speed(double T) { return std::sqrt(8.0 * consts::k_B * T / (consts::pi * mass)); }
}  // namespace rb85

// Ladder 5S -> 5P3/2 -> nS -> nP driven by probe, coupling and RF (LO) fields.
struct FourLevelSystem {
    double delta_p = 0.0, delta_c = 0.0, delta_rf = 0.0;  // rad/s
    double omega_p = consts::two_pi * 9.8e6;
    double omega_c = consts::two_pi * 1.8e6;
    double omega_rf = 0.0;
    double gamma21 = rb85::d2_gamma;   // 1/s
    double gamma32 = 7.5607e3;         // 70S total decay incl. blackbody at 300 K
    double gamma43 = 5.5750e3;         // 70P3/2 total decay incl. blackbody at 300 K
    double gamma_d = consts::two_pi * 100e3;
    double mu12 = rb85::d2_reduced_dipole / std::sqrt(3.0) * consts::e * consts::a0;  // mj 1/2 -> 1/2
    double mu_d = 2933.9 * consts::e * consts::a0;
    double density = rb85::doppler_equivalent_density(300.0);
    double length = 70e-3;
    double w0 = 1e-3;
    double nu_p = consts::c / rb85::d2_wavelength;
    double temperature = 300.0;
    bool transit_broadening = false;

    double transit_rate() const { return rb85::mean_speed(temperature) / (w0 * std::sqrt(consts::two_pi)); }
    double dephasing() const { return gamma_d + (transit_broadening ? transit_rate() : 0.0); }

    // Probe power whose Gaussian peak field gives Rabi frequency omega_p.
    double probe_power() const {
        const double E0 = consts::hbar * omega_p / mu12;
        return consts::pi * w0 * w0 * consts::c * consts::eps0 * E0 * E0 / 4.0;
    }

    void validate() const {
        require(gamma21 >= 0.0 && gamma32 >= 0.0 && gamma43 >= 0.0 && gamma_d >= 0.0, "rates must be >= 0");
        require(density >= 0.0, "density must be >= 0");
        require(mu12 > 0.0 && mu_d > 0.0 && length > 0.0 && w0 > 0.0 && nu_p > 0.0, "geometry and dipoles must be positive");
        require(omega_p >= 0.0 && omega_c >= 0.0 && omega_rf >= 0.0, "Rabi frequencies must be >= 0");
    }
};

using Matrix4c = Eigen::Matrix<std::complex<double>, 4, 4>;
using Matrix16c = Eigen::Matrix<std::complex<double>, 16, 16>;
using Vector16c = Eigen::Matrix<std::complex<double>, 16, 1>;

inline Matrix4c hamiltonian(const FourLevelSystem& s) {
    Matrix4c H = Matrix4c::Zero();
    H(1, 1) = -s.delta_p;
    H(2, 2) = -(s.delta_p + s.delta_c);
    H(3, 3) = -(s.delta_p + s.delta_c + s.delta_rf);
    H(0, 1) = H(1, 0) = 0.5 * s.omega_p;
    H(1, 2) = H(2, 1) = 0.5 * s.omega_c;
    H(2, 3) = H(3, 2) = 0.5 * s.omega_rf;
    return H;
}

// Row-major vectorisation: vec(A rho B) = kron(A, B^T) vec(rho).
inline Matrix16c liouvillian(const FourLevelSystem& s) {
    const Matrix4c H = hamiltonian(s);
    const Matrix4c I = Matrix4c::Identity();
    const std::complex<double> j(0.0, 1.0);
    auto kron = [](const Matrix4c& A, const Matrix4c& B) {
        Matrix16c K;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) K.block<4, 4>(4 * a, 4 * b) = A(a, b) * B;
        return K;
    };
    Matrix16c Lm = -j * (kron(H, I) - kron(I, H.transpose()));
    auto dissipate = [&](const Matrix4c& c) {
        const Matrix4c cdc = c.adjoint() * c;
        Lm += kron(c, c.conjugate()) - 0.5 * kron(cdc, I) - 0.5 * kron(I, cdc.transpose());
    };
    const double rates[3] = {s.gamma21, s.gamma32, s.gamma43};
    for (int k = 0; k < 3; ++k) {
        Matrix4c c = Matrix4c::Zero();
        c(k, k + 1) = std::sqrt(rates[k]);
        dissipate(c);
    }
    const double gd = s.dephasing();
    for (int k = 0; k < 4; ++k) {
        Matrix4c c = Matrix4c::Zero();
        c(k, k) = std::sqrt(gd);
        dissipate(c);
    }
    return Lm;
}

struct SteadyState {
    Matrix4c rho;
    double residual;  // ||L rho|| / ||L||
};

inline SteadyState steady_state(const FourLevelSystem& s) {
    s.validate();
    const Matrix16c Lm = liouvillian(s);
    Matrix16c A = Lm;
    Vector16c b = Vector16c::Zero();
    A.row(0).setZero();
    for (int i = 0; i < 4; ++i) A(0, 5 * i) = 1.0;
    b(0) = 1.0;
    const auto lu = A.partialPivLu();
    const auto piv = lu.matrixLU().diagonal().cwiseAbs();
    if (!(piv.minCoeff() > 1e-13 * piv.maxCoeff())) throw numerical_error("steady_state: singular Liouvillian");
    const Vector16c x = lu.solve(b);
    if (!x.allFinite()) throw numerical_error("steady_state: singular Liouvillian");
    const double res = (Lm * x).norm() / std::max(Lm.norm(), 1e-300);
    if (!(res < 1e-6)) throw numerical_error("steady_state: singular Liouvillian (residual " + std::to_string(res) + ")");
    Matrix4c rho;
    for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c) rho(a, c) = x(4 * a + c);
    return {rho, res};
}

inline std::complex<double> susceptibility(const FourLevelSystem& s, const SteadyState& ss) {
    if (s.omega_p <= 0.0 || s.density == 0.0) return 0.0;
    return -2.0 * s.density * s.mu12 * s.mu12 * ss.rho(1, 0) / (consts::eps0 * consts::hbar * s.omega_p);
}

inline double transmission(const FourLevelSystem& s) {
    const auto chi = susceptibility(s, steady_state(s));
    const double kp = consts::two_pi * s.nu_p / consts::c;
    const double kpp = std::max(0.0, kp * std::sqrt(1.0 + chi).imag());
    return std::exp(-2.0 * kpp * s.length);
}

inline bool optically_thin(double T_r) { return 1.0 - T_r <= 0.5; }

inline FourLevelSystem with_rf(FourLevelSystem s, double omega_rf) {
    s.omega_rf = omega_rf;
    return s;
}

// T_r depends on |Omega_RF| only, so stencils may straddle zero.
inline double transmission_at(const FourLevelSystem& s, double omega_rf) { return transmission(with_rf(s, std::abs(omega_rf))); }

inline double slope_step(double omega_rf) { return std::max(1e-4 * omega_rf, consts::two_pi * 10.0); }

// dT_r / dOmega_RF [s]: central difference, one Richardson step.
inline double transmission_slope(const FourLevelSystem& s) {
    const double h = slope_step(s.omega_rf);
    auto d = [&](double hh) {
        return (transmission_at(s, s.omega_rf + hh) - transmission_at(s, s.omega_rf - hh)) / (2.0 * hh);
    };
    return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

inline double transmission_slope_5pt(const FourLevelSystem& s, double h) {
    auto t = [&](double dx) { return transmission_at(s, s.omega_rf + dx); };
    return (-t(2 * h) + 8 * t(h) - 8 * t(-h) + t(-2 * h)) / (12.0 * h);
}

inline constexpr double zero_slope = 1e-18;

// Shot-noise-limited NEF0 [V m^-1 Hz^-1/2] at the system's LO operating point.
// Uses the Planck constant h against the angular Rabi-frequency resolution;
// a strict hbar conversion gives values 2 pi lower.
inline double nef0_model(const FourLevelSystem& s) {
    const double slope = transmission_slope(s);
    if (std::abs(slope) < zero_slope) return std::numeric_limits<double>::infinity();
    const double T = transmission(s);
    const double d_omega = std::sqrt(T * consts::h * s.nu_p / s.probe_power()) / std::abs(slope);
    return std::sqrt(2.0) * consts::h * d_omega / s.mu_d;
}

// Relative probe modulation per unit RF field, for the optical-detection formulas.
inline double modulation_index(const FourLevelSystem& s) {
    return std::abs(transmission_slope(s)) * s.mu_d / consts::h / transmission(s);
}

struct LOOptimum {
    double omega_rf;
    double nef0;
};

inline LOOptimum optimize_lo(const FourLevelSystem& s, double lo_min = consts::two_pi * 100e3,
                             double lo_max = consts::two_pi * 40e6, int n_scan = 40) {
    const auto grid = num::logspace(lo_min, lo_max, n_scan);
    std::size_t best = 0;
    double vb = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = nef0_model(with_rf(s, grid[i]));
        if (v < vb) { vb = v; best = i; }
    }
    if (!std::isfinite(vb)) return {grid[best], vb};
    const double a = std::log(grid[best == 0 ? 0 : best - 1]);
    const double b = std::log(grid[std::min(best + 1, grid.size() - 1)]);
    auto r = num::minimize([&](double l) { return nef0_model(with_rf(s, std::exp(l))); }, a, b, 1e-4);
    if (r.fx < vb) return {std::exp(r.x), r.fx};
    return {grid[best], vb};
}

struct RabiBounds {
    double p_min = consts::two_pi * 0.3e6, p_max = consts::two_pi * 30e6;
    double c_min = consts::two_pi * 0.3e6, c_max = consts::two_pi * 30e6;
};

struct RabiGridCell {
    double omega_p, omega_c, omega_rf, nef0;
};

struct RabiOptimum {
    double omega_p, omega_c, omega_rf, nef0;
    int n;                          // grid points per axis
    std::vector<RabiGridCell> grid; // row-major, omega_p slow
};

// Strict 8-neighbour local minima of a row-major n x n grid.
inline std::vector<std::size_t> grid_local_minima(const std::vector<RabiGridCell>& g, int n) {
    std::vector<std::size_t> out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double v = g[i * n + j].nef0;
            if (!std::isfinite(v)) continue;
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (!di && !dj) continue;
                    const int a = i + di, b = j + dj;
                    if (a < 0 || b < 0 || a >= n || b >= n) continue;
                    if (g[a * n + b].nef0 <= v) { is_min = false; break; }
                }
            if (is_min) out.push_back(static_cast<std::size_t>(i * n + j));
        }
    return out;
}

inline RabiOptimum optimize_rabi(const FourLevelSystem& tmpl, const RabiBounds& bd = {}, int n = 41, int k_starts = 3) {
    require(bd.p_min > 0.0 && bd.p_max > bd.p_min && bd.c_min > 0.0 && bd.c_max > bd.c_min, "bad Rabi bounds");
    const auto ps = num::logspace(bd.p_min, bd.p_max, n);
    const auto cs = num::logspace(bd.c_min, bd.c_max, n);
    RabiOptimum out{0, 0, 0, std::numeric_limits<double>::infinity(), n, {}};
    out.grid.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            FourLevelSystem s = tmpl;
            s.omega_p = ps[i];
            s.omega_c = cs[j];
            const auto lo = optimize_lo(s);
            out.grid[i * n + j] = {ps[i], cs[j], lo.omega_rf, lo.nef0};
        }
    std::vector<std::size_t> order(out.grid.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return out.grid[a].nef0 < out.grid[b].nef0; });
    if (!std::isfinite(out.grid[order[0]].nef0)) throw numerical_error("optimize_rabi: NEF0 infinite on whole grid");
    const auto& g0 = out.grid[order[0]];
    out.omega_p = g0.omega_p;
    out.omega_c = g0.omega_c;
    out.omega_rf = g0.omega_rf;
    out.nef0 = g0.nef0;

    const double lp0 = std::log(bd.p_min), lp1 = std::log(bd.p_max);
    const double lc0 = std::log(bd.c_min), lc1 = std::log(bd.c_max);
    auto objective = [&](const std::vector<double>& x) {
        if (x[0] < lp0 || x[0] > lp1 || x[1] < lc0 || x[1] > lc1) return std::numeric_limits<double>::infinity();
        FourLevelSystem s = tmpl;
        s.omega_p = std::exp(x[0]);
        s.omega_c = std::exp(x[1]);
        return optimize_lo(s).nef0;
    };
    const double step = 0.5 * (lp1 - lp0) / (n - 1);
    for (int k = 0; k < std::min<int>(k_starts, static_cast<int>(order.size())); ++k) {
        const auto& c = out.grid[order[k]];
        auto r = num::nelder_mead(objective, {std::log(c.omega_p), std::log(c.omega_c)}, {step, step}, 1e-6, 200);
        if (r.fx < out.nef0) {
            FourLevelSystem s = tmpl;
            s.omega_p = std::exp(r.x[0]);
            s.omega_c = std::exp(r.x[1]);
            const auto lo = optimize_lo(s);
            out.omega_p = s.omega_p;
            out.omega_c = s.omega_c;
            out.omega_rf = lo.omega_rf;
            out.nef0 = lo.nef0;
        }
    }
    return out;
}

}  // namespace rydnoise
