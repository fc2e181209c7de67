#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "constants.hpp"
#include "noisequanta.hpp"
#include "numerics.hpp"

namespace rydnoise {

struct RectWaveguide {
    double a = 22.86e-3;  // broad wall [m]
    double b = 10.16e-3;  // narrow wall [m]
    double sigma = std::numeric_limits<double>::infinity();  // S/m
    std::complex<double> eps_r{1.0, 0.0};  // eps' - i eps''

    void validate() const {
        require(a > b && b > 0.0, "need a > b > 0");
        require(sigma > 0.0, "conductivity must be positive");
    }
    double cutoff() const { return consts::c / (2.0 * a * std::sqrt(eps_r.real())); }
};

inline double te10_beta(const RectWaveguide& wg, double omega) {
    const double k2 = omega * omega * wg.eps_r.real() / (consts::c * consts::c);
    const double kc = consts::pi / wg.a;
    require(k2 > kc * kc, "TE10 below cutoff");
    return std::sqrt(k2 - kc * kc);
}

// TE10 propagation constant alpha + i beta, with conductor loss from the
// perturbational surface-resistance formula (Pozar 3.96) and dielectric loss
// from the complex permittivity.
inline std::complex<double> te10_propagation(const RectWaveguide& wg, double f) {
    wg.validate();
    check_frequency(f);
    require(f > wg.cutoff(), "TE10 below cutoff");
    const double om = consts::two_pi * f;
    const double kc = consts::pi / wg.a;
    const std::complex<double> k2 = om * om * wg.eps_r / (consts::c * consts::c);
    std::complex<double> g = std::sqrt(kc * kc - k2);
    if (g.real() < 0.0) g = -g;
    if (g.imag() < 0.0) g = std::conj(g);
    double alpha_c = 0.0;
    if (std::isfinite(wg.sigma)) {
        const double rs = std::sqrt(om * consts::mu0 / (2.0 * wg.sigma));
        const double eta = consts::eta0 / std::sqrt(wg.eps_r.real());
        const double r = wg.cutoff() / f;
        alpha_c = rs / (eta * wg.b * std::sqrt(1.0 - r * r)) * (1.0 + 2.0 * wg.b / wg.a * r * r);
    }
    return {g.real() + alpha_c, te10_beta(wg, om)};
}

inline double guided_wavelength(const RectWaveguide& wg, double f) {
    return consts::two_pi / te10_beta(wg, consts::two_pi * f);
}

struct TE101Constants {
    double K_U;        // at the cavity centre [V m^-1 J^-1/2]
    double tau_ratio;  // tau_g / tau
};

inline TE101Constants te101_constants(const RectWaveguide& wg, double f0) {
    wg.validate();
    const double om = consts::two_pi * f0;
    const double beta = te10_beta(wg, om);
    const double eps = consts::eps0 * wg.eps_r.real();
    return {std::sqrt(8.0 * beta / (eps * consts::pi * wg.a * wg.b)),
            om * om * wg.eps_r.real() / (consts::c * consts::c * beta * beta)};
}

// Transverse-field constant of the TE10 mode at the cross-section centre [V m^-1 W^-1/2].
inline double te10_KW(const RectWaveguide& wg, double f) {
    const double om = consts::two_pi * f;
    const double beta = te10_beta(wg, om);
    const double z_te = om * consts::mu0 / beta;
    return std::sqrt(4.0 * z_te / (wg.a * wg.b));
}

struct RLCCircuit {
    double R = 1.0;      // loss resistance [ohm]
    double R_g = 1.0;    // source resistance [ohm]
    double C0 = 1e-12;   // F
    double h0 = 1e-3;    // plate gap [m]
    double omega0 = consts::two_pi * 1e9;

    void validate() const {
        require(R > 0.0 && R_g > 0.0 && C0 > 0.0 && h0 > 0.0 && omega0 > 0.0, "RLC elements must be positive");
    }
    double inductance() const { return 1.0 / (omega0 * omega0 * C0); }
};

struct RLCConstants {
    double K;        // V m^-1 W^-1/2
    double C;        // cooling factor
    double R_g_opt;  // ohm
};

inline RLCConstants rlc_constants(const RLCCircuit& ck, double T_p, DetectionMode mode, double nef0) {
    ck.validate();
    const double K = 2.0 * std::sqrt(2.0) / (ck.omega0 * ck.h0 * ck.C0) * std::sqrt(ck.R_g) / (ck.R + ck.R_g);
    double ropt = std::numeric_limits<double>::infinity();
    if (nef0 > 0.0) {
        const double th = noise_quantum(ck.omega0 / consts::two_pi, T_p, mode);
        const double d = ck.omega0 * ck.C0 * ck.h0 * nef0;
        ropt = ck.R * std::sqrt(1.0 + 8.0 * th / (ck.R * d * d));
    }
    return {K, ck.R_g / ck.R, ropt};
}

// Sampled vector field on a uniform grid, x fastest.
struct ModeProfileGrid {
    std::array<int, 3> n{0, 0, 0};
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};
    std::vector<std::array<std::complex<double>, 3>> E;
    std::vector<double> eps_r;  // relative permittivity (real part)
    std::vector<double> Sz;     // optional time-averaged Poynting flux along z [W/m^2]

    std::size_t size() const { return static_cast<std::size_t>(n[0]) * n[1] * n[2]; }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * n[1] + j) * n[0] + i;
    }
    std::array<double, 3> point(int i, int j, int k) const {
        return {origin[0] + i * spacing[0], origin[1] + j * spacing[1], origin[2] + k * spacing[2]};
    }
    void validate() const {
        require(n[0] > 0 && n[1] > 0 && n[2] > 0, "empty mode profile");
        require(E.size() == size() && eps_r.size() == size(), "mode profile arrays do not match grid");
        require(Sz.empty() || Sz.size() == size(), "Poynting samples do not match grid");
        for (const auto& e : E)
            for (const auto& c : e) require(std::isfinite(c.real()) && std::isfinite(c.imag()), "non-finite field");
    }

    // Trilinear interpolation of the field at r.
    std::array<std::complex<double>, 3> field_at(const std::array<double, 3>& r) const {
        std::array<int, 3> i0{};
        std::array<double, 3> t{};
        for (int d = 0; d < 3; ++d) {
            const double u = (r[d] - origin[d]) / spacing[d];
            require(u >= -1e-9 && u <= (n[d] - 1) + 1e-9, "point outside mode profile grid");
            if (n[d] == 1) { i0[d] = 0; t[d] = 0.0; continue; }
            i0[d] = std::clamp(static_cast<int>(std::floor(u)), 0, n[d] - 2);
            t[d] = std::clamp(u - i0[d], 0.0, 1.0);
        }
        std::array<std::complex<double>, 3> out{};
        for (int c = 0; c < 8; ++c) {
            const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
            if ((dx && n[0] == 1) || (dy && n[1] == 1) || (dz && n[2] == 1)) continue;
            const double w = (dx ? t[0] : 1 - t[0]) * (dy ? t[1] : 1 - t[1]) * (dz ? t[2] : 1 - t[2]);
            const auto& e = E[index(i0[0] + dx, i0[1] + dy, i0[2] + dz)];
            for (int d = 0; d < 3; ++d) out[d] += w * e[d];
        }
        return out;
    }
};

namespace geo_detail {

inline double trap_weight(int i, int n) { return (n > 1 && (i == 0 || i == n - 1)) ? 0.5 : 1.0; }

inline double projected(const std::array<std::complex<double>, 3>& e, const std::array<double, 3>& a) {
    return std::abs(e[0] * a[0] + e[1] * a[1] + e[2] * a[2]);
}

inline std::array<double, 3> unit(std::array<double, 3> a) {
    const double n = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    require(n > 0.0, "direction vector must be non-zero");
    return {a[0] / n, a[1] / n, a[2] / n};
}

}  // namespace geo_detail

inline double numeric_KU(const ModeProfileGrid& p, const std::array<double, 3>& r0, const std::array<double, 3>& a_e) {
    p.validate();
    const auto a = geo_detail::unit(a_e);
    double energy = 0.0;
    for (int k = 0; k < p.n[2]; ++k)
        for (int j = 0; j < p.n[1]; ++j)
            for (int i = 0; i < p.n[0]; ++i) {
                const auto idx = p.index(i, j, k);
                const auto& e = p.E[idx];
                const double w = geo_detail::trap_weight(i, p.n[0]) * geo_detail::trap_weight(j, p.n[1]) *
                                 geo_detail::trap_weight(k, p.n[2]);
                energy += w * p.eps_r[idx] * (std::norm(e[0]) + std::norm(e[1]) + std::norm(e[2]));
            }
    energy *= 0.5 * consts::eps0 * p.spacing[0] * p.spacing[1] * p.spacing[2];
    require(energy > 0.0, "mode profile carries no energy");
    return geo_detail::projected(p.field_at(r0), a) / std::sqrt(energy);
}

// Cross-section flux from the Sz samples of the plane k = 0.
inline double profile_flux(const ModeProfileGrid& p) {
    require(!p.Sz.empty(), "traveling-mode profile needs Poynting samples");
    double flux = 0.0;
    for (int j = 0; j < p.n[1]; ++j)
        for (int i = 0; i < p.n[0]; ++i)
            flux += geo_detail::trap_weight(i, p.n[0]) * geo_detail::trap_weight(j, p.n[1]) * p.Sz[p.index(i, j, 0)];
    flux *= p.spacing[0] * p.spacing[1];
    if (!(flux > 0.0)) throw numerical_error("degenerate mode: zero net flux");
    return flux;
}

inline double numeric_KW(const ModeProfileGrid& p, const std::array<double, 3>& r0, const std::array<double, 3>& a_e) {
    p.validate();
    return geo_detail::projected(p.field_at(r0), geo_detail::unit(a_e)) / std::sqrt(profile_flux(p));
}

// K_W averaged over a Gaussian beam crossing the k = 0 plane along `axis`,
// weighted by exp(-2 rho^2 / w0^2) with rho the distance from the beam axis.
inline double beam_averaged_KW(const ModeProfileGrid& p, const std::array<double, 3>& centre,
                               const std::array<double, 3>& axis, double w0, const std::array<double, 3>& a_e) {
    p.validate();
    require(w0 > 0.0, "beam waist must be positive");
    const auto ax = geo_detail::unit(axis);
    const auto a = geo_detail::unit(a_e);
    double sw = 0.0, sf = 0.0;
    for (int j = 0; j < p.n[1]; ++j)
        for (int i = 0; i < p.n[0]; ++i) {
            const auto r = p.point(i, j, 0);
            std::array<double, 3> d{r[0] - centre[0], r[1] - centre[1], r[2] - centre[2]};
            const double along = d[0] * ax[0] + d[1] * ax[1] + d[2] * ax[2];
            const double rho2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] - along * along;
            const double w = std::exp(-2.0 * rho2 / (w0 * w0));
            sw += w;
            sf += w * geo_detail::projected(p.E[p.index(i, j, 0)], a);
        }
    require(sw > 0.0, "beam does not overlap the profile");
    return sf / sw / std::sqrt(profile_flux(p));
}

// Columnar text: header line, then x y z ReEx ImEx ReEy ImEy ReEz ImEz eps_r [Sz].
inline ModeProfileGrid load_mode_profile(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("mode profile: missing header");
    struct Row { double x, y, z; std::array<std::complex<double>, 3> e; double eps, sz; };
    std::vector<Row> rows;
    bool has_sz = false;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::vector<double> v;
        double t;
        while (ss >> t) v.push_back(t);
        if (v.size() != 10 && v.size() != 11)
            throw std::runtime_error("mode profile: line " + std::to_string(lineno) + " has " +
                                     std::to_string(v.size()) + " columns");
        if (rows.empty()) has_sz = v.size() == 11;
        if ((v.size() == 11) != has_sz)
            throw std::runtime_error("mode profile: inconsistent column count at line " + std::to_string(lineno));
        rows.push_back({v[0], v[1], v[2], {{{v[3], v[4]}, {v[5], v[6]}, {v[7], v[8]}}}, v[9], has_sz ? v[10] : 0.0});
    }
    require(!rows.empty(), "mode profile: no samples");
    ModeProfileGrid g;
    std::array<std::vector<double>, 3> axes;
    for (const auto& r : rows) {
        axes[0].push_back(r.x);
        axes[1].push_back(r.y);
        axes[2].push_back(r.z);
    }
    for (int d = 0; d < 3; ++d) {
        auto& v = axes[d];
        std::sort(v.begin(), v.end());
        std::vector<double> u;
        for (double x : v)
            if (u.empty() || std::abs(x - u.back()) > 1e-12 * std::max(1.0, std::abs(x))) u.push_back(x);
        g.n[d] = static_cast<int>(u.size());
        g.origin[d] = u.front();
        g.spacing[d] = u.size() > 1 ? (u.back() - u.front()) / (u.size() - 1) : 1.0;
        for (std::size_t i = 1; i < u.size(); ++i)
            require(std::abs(u[i] - u[i - 1] - g.spacing[d]) <= 1e-6 * g.spacing[d], "mode profile grid is not uniform");
    }
    require(g.size() == rows.size(), "mode profile: samples do not fill a full grid");
    g.E.resize(g.size());
    g.eps_r.resize(g.size());
    if (has_sz) g.Sz.resize(g.size());
    for (const auto& r : rows) {
        const int i = static_cast<int>(std::lround((r.x - g.origin[0]) / g.spacing[0]));
        const int j = static_cast<int>(std::lround((r.y - g.origin[1]) / g.spacing[1]));
        const int k = static_cast<int>(std::lround((r.z - g.origin[2]) / g.spacing[2]));
        const auto idx = g.index(i, j, k);
        g.E[idx] = r.e;
        g.eps_r[idx] = r.eps;
        if (has_sz) g.Sz[idx] = r.sz;
    }
    g.validate();
    return g;
}

inline ModeProfileGrid load_mode_profile(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open mode profile " + path);
    return load_mode_profile(f);
}

struct SurveyCavity {
    double a, b, L, w0;  // m
};

inline constexpr double survey_lambda_ratio = 2.5;
inline constexpr double survey_aspect = 0.75;
inline constexpr double survey_w0_cap = 1.43e-3;

// Near-cutoff half-wave cavity used in the frequency survey.
inline SurveyCavity survey_sizing(double f) {
    check_frequency(f);
    const double l0 = consts::c / f;
    const double lg = survey_lambda_ratio * l0;
    const double a = 0.5 / std::sqrt(1.0 / (l0 * l0) - 1.0 / (lg * lg));
    const double b = survey_aspect * a;
    return {a, b, 0.5 * lg, std::min(survey_w0_cap, 0.25 * b)};
}

}  // namespace rydnoise
