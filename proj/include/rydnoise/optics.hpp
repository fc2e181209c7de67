#pragma once

#include <cmath>
#include <limits>

#include "constants.hpp"
#include "numerics.hpp"

namespace rydnoise {

enum class OpticalScheme { Direct, OpticalHomodyne, OpticalHeterodyne };

struct OpticalDetection {
    OpticalScheme scheme = OpticalScheme::Direct;
    double P0 = 1e-6;        // mean probe power on the detector [W]
    double nu_p = 384.2e12;  // Hz
    double eta = 1.0;
    double nep_pd = 0.0;     // W Hz^-1/2
    double m_p = 1.0;        // relative modulation per field [m/V]
    double A_lo_sq = 0.0;    // optical LO power [W]
    double phi_d = 0.0;      // rad

    void validate() const {
        require(P0 > 0.0, "probe power must be positive");
        require(eta > 0.0 && eta <= 1.0, "quantum efficiency must be in (0, 1]");
        require(m_p > 0.0, "modulation index must be positive");
        require(nep_pd >= 0.0, "photodiode NEP must be >= 0");
        if (scheme != OpticalScheme::Direct) require(A_lo_sq > 0.0, "coherent detection needs LO power");
    }
};

inline double nef_optical(const OpticalDetection& d) {
    d.validate();
    const double hv = consts::h * d.nu_p;
    const double nep2 = d.nep_pd * d.nep_pd;
    switch (d.scheme) {
    case OpticalScheme::Direct:
        return std::sqrt(2.0 * hv / (d.eta * d.P0) + nep2 / (d.P0 * d.P0)) / d.m_p;
    case OpticalScheme::OpticalHomodyne: {
        const double c = std::cos(d.phi_d);
        if (std::abs(c) < 1e-12) return std::numeric_limits<double>::infinity();
        return std::sqrt(hv / (2.0 * d.eta * d.P0) + 2.0 * nep2 / (d.P0 * d.A_lo_sq)) / (std::abs(c) * d.m_p);
    }
    case OpticalScheme::OpticalHeterodyne:
        return std::sqrt(hv / (d.eta * d.P0) + 4.0 * nep2 / (d.P0 * d.A_lo_sq)) / d.m_p;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// NEF0 scales inversely with the probe interaction length times beam waist.
inline double volume_scaled_nef(double nef_ref, double L_ref, double w0_ref, double L, double w0) {
    require(L_ref > 0.0 && w0_ref > 0.0 && L > 0.0 && w0 > 0.0, "lengths must be positive");
    return nef_ref * (L_ref * w0_ref) / (L * w0);
}

}  // namespace rydnoise
