// Independent oracles used by the test suites. Everything here is written
// against the definitions, not against the library code paths it checks:
// naive double loops, dense Riemann grids, series summation, closed forms.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// --- measures ---------------------------------------------------------------

using AtomList = std::vector<std::pair<double, double>>;

// Merge-by-tolerance written independently of the library normalization.
inline AtomList tidy(AtomList atoms, double tol = 1e-12) {
    std::sort(atoms.begin(), atoms.end());
    AtomList out;
    for (const auto& [loc, w] : atoms) {
        if (!out.empty() && loc - out.back().first <= tol)
            out.back().second += w;
        else
            out.emplace_back(loc, w);
    }
    AtomList filtered;
    for (const auto& a : out)
        if (a.second != 0.0) filtered.push_back(a);
    return filtered;
}

inline AtomList brute_convolve(const AtomList& a, const AtomList& b) {
    AtomList out;
    for (const auto& [xa, wa] : a)
        for (const auto& [xb, wb] : b) out.emplace_back(xa + xb, wa * wb);
    return tidy(std::move(out));
}

inline AtomList brute_product(const AtomList& a, const AtomList& b) {
    AtomList out;
    for (const auto& [xa, wa] : a)
        for (const auto& [xb, wb] : b) out.emplace_back(xa * xb, wa * wb);
    return tidy(std::move(out));
}

inline double brute_tv(const AtomList& a) {
    double s = 0.0;
    for (const auto& [loc, w] : a) s += std::abs(w);
    return s;
}

// --- special functions ------------------------------------------------------

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// TV distance (unnormalized convention) between N(m1, 1) and N(m2, 1).
inline double gaussian_tv(double m1, double m2) {
    const double d = std::abs(m1 - m2) / 2.0;
    return 2.0 * (2.0 * normal_cdf(d) - 1.0);
}

inline double beta12_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return 1.0 - (1.0 - x) * (1.0 - x);
}

// Density of the law with a Poisson(mu) number of Exp(1) summands, continuous
// part only, by direct series summation: sum_k e^{-mu} mu^k/k! Gamma(k,1).
inline double poisson_exp_mixture_density(double x, double mu) {
    if (x <= 0.0) return 0.0;
    double term = std::exp(-mu) * mu * std::exp(-x); // k = 1
    double sum = term;
    for (int k = 2; k < 400; ++k) {
        term *= mu * x / (static_cast<double>(k) * static_cast<double>(k - 1));
        sum += term;
        if (term < 1e-18 * (1.0 + sum) && k > 8) break;
    }
    return sum;
}

// Quantile of the chi-square distribution (Wilson-Hilferty), good to ~1e-3
// relative for the df used in the tests.
inline double chi2_quantile(double df, double p) {
    const double z = p >= 0.99 ? 2.3263478740408408 : 1.6448536269514722;
    const double a = 2.0 / (9.0 * df);
    const double c = 1.0 - a + z * std::sqrt(a);
    return df * c * c * c;
}

inline double poisson_pmf(int k, double mu) {
    double p = std::exp(-mu);
    for (int i = 1; i <= k; ++i) p *= mu / static_cast<double>(i);
    return p;
}

// --- dense-grid integration -------------------------------------------------

// Midpoint Riemann sum on a uniform grid; the deliberately naive 2-D oracle.
inline double riemann_2d(const std::function<double(double, double)>& f, double t_lo,
                         double t_hi, double x_lo, double x_hi, int nt, int nx) {
    const double dt = (t_hi - t_lo) / nt;
    const double dx = (x_hi - x_lo) / nx;
    double acc = 0.0;
    for (int i = 0; i < nt; ++i) {
        const double t = t_lo + (i + 0.5) * dt;
        for (int j = 0; j < nx; ++j) {
            const double x = x_lo + (j + 0.5) * dx;
            acc += f(t, x);
        }
    }
    return acc * dt * dx;
}

inline double riemann_1d(const std::function<double(double)>& f, double lo, double hi,
                         int n) {
    const double d = (hi - lo) / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += f(lo + (i + 0.5) * d);
    return acc * d;
}

} // namespace oracle
