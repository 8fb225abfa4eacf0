#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace shotnoise::quadrature {

template <class T>
struct Result {
    T value{};
    double error = 0.0;      // accumulated estimate, not a strict bound
    std::size_t evals = 0;
};

namespace detail {

inline double norm_of(double v) { return std::abs(v); }
inline double norm_of(const std::complex<double>& v) { return std::abs(v); }

// Classic adaptive Simpson with Richardson correction. The error estimate of
// a panel is |S_fine - S_coarse| / 15; accepted panels contribute the
// corrected value S_fine + (S_fine - S_coarse) / 15.
template <class T, class F>
void simpson_recurse(const F& f, double a, T fa, double m, T fm, double b, T fb,
                     T whole, double tol, int depth, Result<T>& out) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const T flm = f(lm);
    const T frm = f(rm);
    out.evals += 2;
    const T left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const T right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const T sum = left + right;
    const double delta = norm_of(sum - whole);
    if (depth <= 0 || delta <= 15.0 * tol) {
        out.value += sum + (sum - whole) / 15.0;
        out.error += delta / 15.0;
        return;
    }
    simpson_recurse(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1, out);
    simpson_recurse(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1, out);
}

template <class T, class F>
void integrate_panel(const F& f, double a, double b, double tol, int max_depth,
                     Result<T>& out) {
    if (!(b > a)) return;
    const double m = 0.5 * (a + b);
    const T fa = f(a);
    const T fm = f(m);
    const T fb = f(b);
    out.evals += 3;
    const T whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_recurse(f, a, fa, m, fm, b, fb, whole, tol, max_depth, out);
}

} // namespace detail

// Integrate f over [a, b]. `splits` marks interior kinks/jumps; each resulting
// subinterval gets a tolerance share proportional to its length.
template <class T, class F>
Result<T> integrate(const F& f, double a, double b, double tol,
                    const std::vector<double>& splits = {}, int max_depth = 28) {
    Result<T> out;
    if (!(b > a)) return out;
    std::vector<double> pts;
    pts.push_back(a);
    for (double s : splits)
        if (s > a && s < b) pts.push_back(s);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const double total = b - a;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double share = std::max((pts[i + 1] - pts[i]) / total, 1e-3);
        detail::integrate_panel(f, pts[i], pts[i + 1], tol * share, max_depth, out);
    }
    return out;
}

enum class TailStatus { finite, divergent, inconclusive };

template <class T>
struct TimeAxisResult {
    T value{};
    double error = 0.0;
    TailStatus status = TailStatus::finite;
    double stopped_at = 0.0;  // upper end of the last integrated panel
    std::size_t evals = 0;
};

// Integrate f over [0, inf) by geometric panels [0,1], [1,2], [2,4], ...
// A panel ends the integration when the caller's tail bound at its right edge
// drops below tol, or when panel contributions decay geometrically and the
// extrapolated tail is below tol. Partial sums exceeding divergence_threshold
// while still growing are reported divergent; running out of panels with no
// decay and no bound is inconclusive.
template <class T, class F, class TailBound>
TimeAxisResult<T> integrate_time_axis(const F& f, const std::vector<double>& splits,
                                      const TailBound& tail_bound, double tol,
                                      double divergence_threshold = 1e8,
                                      int max_panels = 56, int max_depth = 24) {
    TimeAxisResult<T> out;
    double lo = 0.0, hi = 1.0;
    double prev_contrib = 0.0;
    int decaying = 0;
    for (int panel = 0; panel < max_panels; ++panel) {
        Result<T> part = integrate<T>(f, lo, hi, tol * 0.25, splits, max_depth);
        out.value += part.value;
        out.error += part.error;
        out.evals += part.evals;
        out.stopped_at = hi;
        const double contrib = detail::norm_of(part.value);

        if (std::optional<double> bound = tail_bound(hi); bound && *bound <= tol * 0.5) {
            out.error += *bound;
            return out;
        }
        if (detail::norm_of(out.value) > divergence_threshold && contrib >= prev_contrib) {
            out.status = TailStatus::divergent;
            return out;
        }
        // Geometric-decay extrapolation for kernels without a closed tail bound.
        if (panel > 0 && prev_contrib > 0.0 && contrib < 0.9 * prev_contrib) {
            ++decaying;
            const double r = contrib / prev_contrib;
            const double tail_est = contrib * r / (1.0 - r);
            if (decaying >= 3 && tail_est <= tol * 0.5) {
                out.error += 2.0 * tail_est;
                return out;
            }
        } else if (contrib > 0.0) {
            decaying = 0;
        } else if (prev_contrib == 0.0 && panel >= 8 && !tail_bound(hi)) {
            // Nothing seen over [0, 2^8] and no tail information to rule out
            // mass further out.
            out.status = TailStatus::inconclusive;
            return out;
        }
        prev_contrib = contrib;
        lo = hi;
        hi *= 2.0;
    }
    out.status = TailStatus::inconclusive;
    return out;
}

} // namespace shotnoise::quadrature
