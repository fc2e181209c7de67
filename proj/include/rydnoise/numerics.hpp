#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace rydnoise {

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw std::domain_error(what);
}

namespace num {

struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n.
inline GaussRule gauss_legendre(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
}

template <class F>
double integrate_rule(const GaussRule& r, F&& f, double a, double b) {
    const double hw = 0.5 * (b - a), mid = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(mid + hw * r.x[i]);
    return s * hw;
}

// Adaptive Gauss-Kronrod (61-point) on a finite interval.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-10, double* err = nullptr, unsigned max_depth = 15) {
    double e = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        std::forward<F>(f), a, b, max_depth, rel_tol, &e);
    if (err) *err = e;
    return v;
}

struct Min1D {
    double x;
    double fx;
};

// Bracketed 1D minimisation (Brent: golden section + parabolic steps).
template <class F>
Min1D minimize(F&& f, double a, double b, double rel_tol = 1e-6) {
    const int bits = std::clamp(static_cast<int>(std::ceil(-std::log2(rel_tol))) + 2, 8, 50);
    std::uintmax_t iters = 500;
    auto r = boost::math::tools::brent_find_minima(f, a, b, bits, iters);
    return {r.first, r.second};
}

// Bisection root on [a, b]; f(a) and f(b) must differ in sign.
template <class F>
double bisect(F&& f, double a, double b, double rel_tol = 1e-12) {
    auto tol = [rel_tol](double lo, double hi) { return std::abs(hi - lo) <= rel_tol * std::abs(lo); };
    auto r = boost::math::tools::bisect(f, a, b, tol);
    return 0.5 * (r.first + r.second);
}

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

inline std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v(n);
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i) v[i] = std::exp(n == 1 ? la : la + (lb - la) * i / (n - 1));
    return v;
}

struct NMResult {
    std::vector<double> x;
    double fx;
    int iterations;
};

// Nelder-Mead simplex, standard coefficients.
inline NMResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                            std::vector<double> x0, std::vector<double> step,
                            double ftol = 1e-8, int max_iter = 2000) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> s(n + 1, x0);
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i < n; ++i) s[i + 1][i] += step[i];
    for (std::size_t i = 0; i <= n; ++i) fs[i] = f(s[i]);
    int it = 0;
    std::vector<std::size_t> idx(n + 1);
    for (; it < max_iter; ++it) {
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return fs[a] < fs[b]; });
        const double fb = fs[idx[0]], fw = fs[idx[n]];
        if (std::isfinite(fb) && std::isfinite(fw) &&
            std::abs(fw - fb) <= ftol * (std::abs(fb) + std::abs(fw) + 1e-300))
            break;
        std::vector<double> cen(n, 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t d = 0; d < n; ++d) cen[d] += s[idx[k]][d] / n;
        auto along = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d) p[d] = cen[d] + t * (s[idx[n]][d] - cen[d]);
            return p;
        };
        auto xr = along(-1.0);
        const double fr = f(xr);
        if (fr < fs[idx[0]]) {
            auto xe = along(-2.0);
            const double fe = f(xe);
            if (fe < fr) { s[idx[n]] = xe; fs[idx[n]] = fe; }
            else { s[idx[n]] = xr; fs[idx[n]] = fr; }
        } else if (fr < fs[idx[n - 1]]) {
            s[idx[n]] = xr; fs[idx[n]] = fr;
        } else {
            const bool outside = fr < fs[idx[n]];
            auto xc = along(outside ? -0.5 : 0.5);
            const double fc = f(xc);
            if (fc < (outside ? fr : fs[idx[n]])) {
                s[idx[n]] = xc; fs[idx[n]] = fc;
            } else {
                for (std::size_t k = 1; k <= n; ++k) {
                    for (std::size_t d = 0; d < n; ++d)
                        s[idx[k]][d] = s[idx[0]][d] + 0.5 * (s[idx[k]][d] - s[idx[0]][d]);
                    fs[idx[k]] = f(s[idx[k]]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fs[i] < fs[best]) best = i;
    return {s[best], fs[best], it};
}

}  // namespace num
}  // namespace rydnoise
