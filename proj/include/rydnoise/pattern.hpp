#pragma once

#include <cmath>

#include "constants.hpp"
#include "numerics.hpp"

namespace rydnoise {

// Thin atomic beam of length L along the y axis; the LO arrives from (theta_lo, phi_lo).
struct BeamGeometry {
    double L = 0.0;
    double lambda0 = 0.03;
    double theta_lo = consts::pi / 2;
    double phi_lo = 0.0;

    // beta_lo is the angle between the LO direction and the beam axis.
    static BeamGeometry from_beta(double L, double lambda0, double beta_lo) {
        return {L, lambda0, consts::pi / 2, consts::pi / 2 - beta_lo};
    }
    double lo_cosine() const { return std::sin(theta_lo) * std::sin(phi_lo); }
    void validate() const {
        require(L >= 0.0, "interaction length must be >= 0");
        require(lambda0 > 0.0, "wavelength must be positive");
    }
};

inline double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

inline double reception_pattern(const BeamGeometry& g, double theta, double phi) {
    const double kappa = consts::two_pi / g.lambda0;
    const double arg = 0.5 * kappa * g.L * (std::sin(theta) * std::sin(phi) - g.lo_cosine());
    return std::sin(theta) * sinc(arg);
}

// Pattern solid-angle integral with an n x 2n Gauss-Legendre product rule.
inline double pattern_integral(const BeamGeometry& g, int n) {
    const auto rt = num::gauss_legendre(n);
    const auto rp = num::gauss_legendre(2 * n);
    return num::integrate_rule(rt, [&](double th) {
        const double st = std::sin(th);
        return st * num::integrate_rule(rp, [&](double ph) {
            const double F = reception_pattern(g, th, ph);
            return F * F;
        }, 0.0, consts::two_pi);
    }, 0.0, consts::pi);
}

inline double effective_gain(const BeamGeometry& g, double rel_tol = 1e-7, int max_nodes = 2048) {
    g.validate();
    int n = 64;
    double prev = pattern_integral(g, n);
    while (n < max_nodes) {
        n *= 2;
        const double cur = pattern_integral(g, n);
        if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) return 4.0 * consts::pi / cur;
        prev = cur;
    }
    throw numerical_error("effective_gain: no convergence at " + std::to_string(max_nodes) +
                          " nodes, L/lambda0 = " + std::to_string(g.L / g.lambda0));
}

inline double gain_correction(double nef_ex, double G) {
    require(G >= 1.5 - 1e-9, "gain below 3/2 is unphysical for this ensemble");
    return nef_ex / std::sqrt(2.0 * G / 3.0);
}

}  // namespace rydnoise
