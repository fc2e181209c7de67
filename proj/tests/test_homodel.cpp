#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <rydnoise/geometry.hpp>
#include <rydnoise/homodel.hpp>

using namespace rydnoise;

namespace {

HOResonator wr90(double coupling_ratio = 1.0) {
    const auto t = te101_constants(RectWaveguide{}, 10e9);
    auto r = HOResonator::from_q(10e9, 2000.0, 2000.0 / coupling_ratio, 1e-10, 1e-10 * t.tau_ratio, t.K_U);
    return r;
}

// Integral of a Lorentzian-shaped density over the whole line, via delta = (bw/pi) tan(u).
template <class F>
double whole_line(F&& f, double bw) {
    const double s = bw / consts::pi;
    return num::integrate([&](double u) { const double c = std::cos(u); return f(s * std::tan(u)) * s / (c * c); },
                          -0.5 * consts::pi, 0.5 * consts::pi, 1e-12);
}

}  // namespace

TEST(HOModel, Lorentzian) {
    EXPECT_EQ(lorentzian(0.0, 3.0), 1.0);
    EXPECT_NEAR(lorentzian(3.0 / consts::pi, 3.0), 0.5, 1e-15);
    const double bw = 2.0e6;
    EXPECT_NEAR(whole_line([&](double d) { return lorentzian(d, bw); }, bw), bw, 1e-6 * bw);
    EXPECT_THROW(lorentzian(0.0, 0.0), std::domain_error);
}

TEST(HOModel, CoolingFactorForms) {
    auto r = wr90();
    r.tau = r.tau_g = 1e-15;
    EXPECT_NEAR(cooling_factor(r, Forms::Exact), 1.0, 1e-6);
    r = with_coupling(r, 10.0 * r.gamma_i);
    r.tau = 1e-4 / r.gamma();
    EXPECT_NEAR(cooling_factor(r, Forms::Exact) / cooling_factor(r), 1.0, 1e-3);
}

// The two forms differ at first order in gamma*tau (more for heavy overcoupling),
// so 0.5% agreement needs gamma*tau <= 0.004.
TEST(HOModel, ExactAndApproximateAgreeAtHighQ) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0), t(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        HOResonator r{10e9, 1e6, 1e6 * std::pow(10.0, u(rng)), 1e-10, 1e-10, 1e3};
        const double gt = 0.01 * t(rng);
        r.tau = r.tau_g = gt / r.gamma();
        const double dc = std::abs(cooling_factor(r, Forms::Exact) / cooling_factor(r) - 1.0);
        const double dk = std::abs(field_per_power_sq(r, 0.0, Forms::Exact) / field_per_power_sq(r) - 1.0);
        const double C = r.coupling_ratio();
        EXPECT_LE(dc, gt * (1.01 + 0.2 * C * gt));
        EXPECT_LE(dk, 1.01 * gt);
        if (gt <= 0.004 && C <= 100.0) {
            EXPECT_LE(dc, 5e-3);
            EXPECT_LE(dk, 5e-3);
        }
    }
}

TEST(HOModel, FieldEnhancementAnchor) {
    const auto r = wr90();
    EXPECT_NEAR(r.K_U, 4.43e8, 0.01 * 4.43e8);
    EXPECT_NEAR(field_enhancement(r), 39.5, 0.02 * 39.5);
    EXPECT_LT(field_per_sqrt_power(r, 1e12), 1e-3 * field_per_sqrt_power(r));
}

TEST(HOModel, FieldPeaksAtCriticalCoupling) {
    const auto r = wr90();
    const auto gs = num::logspace(0.01 * r.gamma_i, 100.0 * r.gamma_i, 401);
    std::size_t best = 0;
    for (std::size_t i = 1; i < gs.size(); ++i)
        if (field_per_power_sq(with_coupling(r, gs[i])) > field_per_power_sq(with_coupling(r, gs[best]))) best = i;
    EXPECT_NEAR(gs[best] / r.gamma_i, 1.0, 0.02);
}

TEST(HOModel, LangevinSeries) {
    HOResonator r{10e9, 1e-3 / 1e-10, 1e-3 / 1e-10, 1e-10, 1e-10, 1.0};
    EXPECT_NEAR(langevin_strength(r) / (2.0 * r.gamma_i * r.tau), 1.0, 5e-3);
    r.gamma_i = 1e-9;
    r.gamma_c = 1e-4 / r.tau;
    EXPECT_LT(std::abs(langevin_strength(r)), 4.0 * std::pow(r.gamma() * r.tau, 2));
}

TEST(HOModel, NETAnchors) {
    const HOEnvironment env;
    EXPECT_NEAR(ho_net(wr90(), env, 1.25e-6), 591.0, 0.03 * 591.0);
    const auto r = wr90();
    const double gc = optimal_coupling(r, env, 1.25e-6);
    EXPECT_NEAR(gc / r.gamma_i, 14.3, 0.1 * 14.3);
    EXPECT_NEAR(ho_net(with_coupling(r, gc), env, 1.25e-6), 87.0, 0.05 * 87.0);
}

TEST(HOModel, QuantumFloor) {
    auto r = wr90();
    const HOEnvironment env;
    r = with_coupling(r, 1e15 * r.gamma_i);
    EXPECT_NEAR(ho_nep(r, env, 0.0), noise_quantum(r.f0, 0.0, env.mode), 1e-9 * ho_nep(r, env, 0.0));
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const auto s = with_coupling(wr90(), wr90().gamma_i * std::pow(10.0, u(rng)));
        EXPECT_GE(ho_nep(s, env, 1e-6 * std::pow(10.0, u(rng))), noise_quantum(s.f0, 0.0, env.mode));
    }
}

TEST(HOModel, OptimalCouplingMatchesGrid) {
    const HOEnvironment env;
    for (double nef0 : {1e-7, 1.25e-6, 1e-5, 1e-4}) {
        const auto r = wr90();
        const auto gs = num::logspace(1e-3 * r.gamma_i, 1e3 * r.gamma_i, 100);
        std::vector<double> v(gs.size());
        std::size_t best = 0;
        for (std::size_t i = 0; i < gs.size(); ++i) {
            v[i] = ho_nep(with_coupling(r, gs[i]), env, nef0);
            if (v[i] < v[best]) best = i;
        }
        // unimodal: decreasing then increasing
        for (std::size_t i = 1; i <= best; ++i) EXPECT_LE(v[i], v[i - 1]);
        for (std::size_t i = best + 1; i < v.size(); ++i) EXPECT_GE(v[i], v[i - 1]);
        const double gopt = optimal_coupling(r, env, nef0);
        const double cell = std::log(gs[1] / gs[0]);
        EXPECT_LE(std::abs(std::log(gopt / gs[best])), cell);
        const double nopt = ho_nep(with_coupling(r, gopt), env, nef0);
        for (double g : gs) EXPECT_LE(nopt, ho_nep(with_coupling(r, g), env, nef0) * (1.0 + 1e-12));
    }
}

TEST(HOModel, OptimalCouplingLimits) {
    const auto r = wr90();
    const HOEnvironment env;
    EXPECT_TRUE(std::isinf(optimal_coupling(r, env, 0.0)));
    EXPECT_NEAR(optimal_coupling(r, env, 1.0) / r.gamma_i, 1.0, 1e-6);
    // exact-form refinement never does worse than the closed form
    const double g0 = optimal_coupling_closed(r, env, 1.25e-6);
    const double ge = optimal_coupling(r, env, 1.25e-6, 0.0, Forms::Exact);
    EXPECT_LE(ho_nep(with_coupling(r, ge), env, 1.25e-6, 0.0, Forms::Exact),
              ho_nep(with_coupling(r, g0), env, 1.25e-6, 0.0, Forms::Exact));
}

TEST(HOModel, BreakEven) {
    const auto r = wr90();
    const HOEnvironment env;
    const double b = break_even_nef0(r, env, true);
    EXPECT_NEAR(b * 1e9, 6.0, 0.25 * 6.0);
    EXPECT_NEAR(optimal_nef(r, env, b, true), b, 1e-9 * b);
    EXPECT_LT(optimal_nef(r, env, 1e-7, true), 1e-7);
    EXPECT_GT(optimal_nef(r, env, 1e-9, true), 1e-9);
}

TEST(HOModel, InputReflection) {
    const auto r = wr90();
    EXPECT_NEAR(std::abs(input_reflection(r)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(input_reflection(r, 1e6 * r.gamma())), 1.0, 1e-6);
    EXPECT_NEAR(std::abs(input_reflection(with_coupling(r, 2.0 * r.gamma_i))), 1.0 / 3.0, 1e-15);
    for (double d : {-3.0, -0.5, 0.2, 4.0})
        EXPECT_LE(std::abs(input_reflection(with_coupling(r, 5.0 * r.gamma_i), d * r.gamma())), 1.0 + 1e-15);
}

TEST(HOModel, EquilibriumEnergy) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-2.0, 2.0), t(0.05, 1.0);
    for (int i = 0; i < 100; ++i) {
        HOResonator r{10e9, 1e6, 1e6 * std::pow(10.0, u(rng)), 1e-10, 1e-10, 1e3};
        r.tau = r.tau_g = 0.01 * t(rng) / r.gamma();
        const HOEnvironment env{290.0, 290.0, DetectionMode::Homodyne};
        const double bw = resonance_bandwidth(r);
        const double U = whole_line([&](double d) { return stored_energy_spectra(r, env, 0.0, 0.0, d).w_th; }, bw) /
                         consts::two_pi;
        const double th = noise_quantum(r.f0, 290.0, env.mode);
        EXPECT_NEAR(U / th, 1.0, 1e-4);
    }
}

TEST(HOModel, SpectraBasics) {
    const auto r = wr90();
    const HOEnvironment cold{0.0, 0.0, DetectionMode::Homodyne};
    EXPECT_GT(stored_energy_spectra(r, cold, 0.0, 0.0, 0.0).w_th, 0.0);
    const double bw = resonance_bandwidth(r);
    const double w0 = stored_energy_spectra(r, cold, 0.0, 1.0, 0.0).w_sig;
    EXPECT_NEAR(stored_energy_spectra(r, cold, 0.0, 1.0, bw / consts::pi).w_sig / w0, 0.5, 1e-12);
    EXPECT_NEAR(stored_energy_spectra(r, cold, 2e-6, 1.0, 0.0).w_0, 4e-12 / (r.K_U * r.K_U), 1e-24 / (r.K_U * r.K_U));
}

TEST(HOModel, Validation) {
    auto r = wr90();
    r.gamma_i = 0.0;
    EXPECT_THROW(ho_nep(r, HOEnvironment{}, 1e-6), std::domain_error);
    EXPECT_NEAR(HOResonator::q_from_rate(10e9, HOResonator::rate_from_q(10e9, 1234.0)), 1234.0, 1e-9);
    EXPECT_TRUE(wr90().high_q());
}
