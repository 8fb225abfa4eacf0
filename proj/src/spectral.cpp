#include "shotnoise/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "shotnoise/errors.hpp"
#include "shotnoise/parallel.hpp"
#include "shotnoise/quadrature.hpp"
#include "shotnoise/rng.hpp"

namespace shotnoise::spectral {

namespace {

using kernels::Kernel;
using quadrature::TailStatus;
using stochastic::JumpLaw;
using stochastic::RngStream;
using cplx = std::complex<double>;

constexpr double kPi = std::numbers::pi;

// e^{iuy} - 1 - iuy 1_{|y|<=1}. The real part is written as -2 sin^2 and the
// small-angle imaginary part as a series so that nothing cancels for |uy|
// below ~1e-3.
cplx centered_exp_term(double u, double y) {
    const double th = u * y;
    const double s = std::sin(0.5 * th);
    const double re = -2.0 * s * s;
    double im;
    if (std::abs(y) <= 1.0) {
        const double t2 = th * th;
        if (std::abs(th) < 1e-3)
            im = -th * t2 / 6.0 * (1.0 - t2 / 20.0);
        else
            im = std::sin(th) - th;
    } else {
        im = std::sin(th);
    }
    return {re, im};
}

struct ExponentTerm {
    cplx value{0.0, 0.0};
    double error = 0.0;
    bool divergent = false;
    bool inconclusive = false;
};

// General route: the exponent integral at one u via the centered integrand,
// iterated sigma(dx) (x) dt. The integrand magnitude is bounded by
// (2 1_{|h|>1} + u^2/2 1_{|h|<=1})(h^2 ^ 1), so the saturated square tail of
// the kernel scaled by max(2, u^2/2) drives the time truncation.
ExponentTerm exponent_general(const Kernel& k, const JumpLaw& sigma, double u,
                              const CharFnOptions& opts) {
    const double tail_factor = std::max(2.0, 0.5 * u * u);
    const auto inner = [&](double x) {
        const auto f = [&](double t) { return centered_exp_term(u, k.eval(t, x)); };
        const auto tail = [&](double T) -> std::optional<double> {
            const auto b = k.sat_sq_tail(T, x);
            if (!b) return {};
            return tail_factor * *b;
        };
        return quadrature::integrate_time_axis<cplx>(f, k.time_splits(x), tail,
                                                     opts.tol * 0.25);
    };

    ExponentTerm out;
    if (sigma.is_discrete()) {
        for (const auto& [x, p] : sigma.atoms()) {
            const auto r = inner(x);
            out.value += p * r.value;
            out.error += p * r.error;
            out.divergent |= r.status == TailStatus::divergent;
            out.inconclusive |= r.status == TailStatus::inconclusive;
        }
        return out;
    }
    if (sigma.has_density()) {
        const double box_eps = 1e-12;
        const auto [lo, hi] = sigma.quantile_box(box_eps);
        double inner_err = 0.0;
        const auto f = [&](double x) -> cplx {
            const auto r = inner(x);
            out.divergent |= r.status == TailStatus::divergent;
            out.inconclusive |= r.status == TailStatus::inconclusive;
            inner_err = std::max(inner_err, r.error);
            return sigma.density(x) * r.value;
        };
        const auto r =
            quadrature::integrate<cplx>(f, lo, hi, opts.tol * 0.5, {-1.0, 0.0, 1.0});
        out.value = r.value;
        out.error = r.error + inner_err + 4.0 * box_eps;
        return out;
    }
    RngStream stream(opts.integration.mc_seed, 1);
    const std::size_t n = std::max<std::size_t>(opts.integration.mc_samples, 100);
    cplx sum{0.0, 0.0};
    double sumsq = 0.0, inner_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = inner(sigma.sample(stream));
        out.divergent |= r.status == TailStatus::divergent;
        out.inconclusive |= r.status == TailStatus::inconclusive;
        inner_err = std::max(inner_err, r.error);
        sum += r.value;
        sumsq += std::norm(r.value);
    }
    out.value = sum / static_cast<double>(n);
    const double var = std::max(sumsq / static_cast<double>(n) - std::norm(out.value), 0.0);
    out.error = 3.0 * std::sqrt(var / static_cast<double>(n)) + inner_err;
    return out;
}

// Fast route for h = x g(t) with a closed-form jump transform and an
// absolutely convergent kernel: the exponent collapses to
// int_0^inf (sigmahat(u g(t)) - 1) dt, which is neither oscillatory in x nor
// in need of the centering constant.
ExponentTerm exponent_linear_profile(const kernels::LinearProfile& p,
                                     const JumpLaw& sigma, double u,
                                     const CharFnOptions& opts) {
    const double mean_abs = sigma.mean_abs();
    const auto f = [&](double t) -> cplx {
        if (p.window && t > *p.window) return {0.0, 0.0};
        return sigma.charfn(u * p.g.eval(t)) - 1.0;
    };
    const auto tail = [&](double T) -> std::optional<double> {
        if (p.window && T >= *p.window) return 0.0;
        const auto gt = p.g.abs_tail(T);
        if (!gt) return {};
        return std::abs(u) * mean_abs * *gt;
    };
    std::vector<double> splits = p.g.breakpoints();
    if (p.window) splits.push_back(*p.window);
    const auto r = quadrature::integrate_time_axis<cplx>(f, splits, tail, opts.tol * 0.25);
    ExponentTerm out;
    out.value = r.value;
    out.error = r.error;
    out.divergent = r.status == TailStatus::divergent;
    out.inconclusive = r.status == TailStatus::inconclusive;
    return out;
}

bool fast_route_applicable(const Kernel& k, const JumpLaw& sigma) {
    const auto p = k.linear_profile();
    if (!p || !sigma.has_charfn()) return false;
    // Needs int int |h| < inf: finite |g| integral, or a finite window.
    return p->window.has_value() || p->g.abs_tail(0.0).has_value();
}

} // namespace

CharFnGrid charfn(const Kernel& k, const JumpLaw& sigma, double rate,
                  std::vector<double> u_grid, const CharFnOptions& opts) {
    std::sort(u_grid.begin(), u_grid.end());
    CharFnGrid grid;
    grid.u = u_grid;
    grid.phi.assign(u_grid.size(), cplx{0.0, 0.0});
    grid.err.assign(u_grid.size(), 0.0);
    grid.meta["kernel"] = k.id();
    grid.meta["sigma"] = sigma.id();
    grid.meta["rate"] = std::to_string(rate);

    const bool fast = !opts.force_general_route && fast_route_applicable(k, sigma);
    grid.meta["route"] = fast ? "profile-transform" : "centered-integrand";

    double centering = 0.0;
    if (!fast) {
        const auto l2 = kernels::l2_condition(k, sigma, rate, opts.integration);
        if (l2.divergent)
            throw RefusedError("charfn: existence integral diverges");
        const auto a = kernels::centering_constant(k, sigma, rate, opts.tol * 0.1,
                                                   {}, opts.integration);
        if (!a.converged)
            throw NonConvergedError("charfn: centering constant did not converge");
        centering = a.value;
        grid.meta["centering"] = std::to_string(centering);
    }

    // Hermitian by construction: evaluate each distinct |u| once, conjugate
    // for the negative side. u = 0 is pinned to exactly 1.
    std::vector<double> mags;
    mags.reserve(u_grid.size());
    for (double u : u_grid)
        if (u != 0.0) mags.push_back(std::abs(u));
    std::sort(mags.begin(), mags.end());
    mags.erase(std::unique(mags.begin(), mags.end()), mags.end());

    std::vector<cplx> phi_mag(mags.size());
    std::vector<double> err_mag(mags.size());
    std::string failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(effective_threads(opts.threads))
#endif
    for (long long i = 0; i < static_cast<long long>(mags.size()); ++i) {
        const double u = mags[static_cast<std::size_t>(i)];
        const ExponentTerm e = fast
            ? exponent_linear_profile(*k.linear_profile(), sigma, u, opts)
            : exponent_general(k, sigma, u, opts);
        if (e.divergent || e.inconclusive) {
#ifdef _OPENMP
#pragma omp critical
#endif
            failure = e.divergent ? "divergent" : "inconclusive";
        }
        const cplx exponent = fast ? rate * e.value
                                   : cplx{0.0, centering * u} + rate * e.value;
        const cplx value = std::exp(exponent);
        phi_mag[static_cast<std::size_t>(i)] = value;
        err_mag[static_cast<std::size_t>(i)] = rate * e.error * std::abs(value);
    }
    if (failure == "divergent")
        throw RefusedError("charfn: exponent integral diverges");
    if (failure == "inconclusive")
        throw NonConvergedError("charfn: exponent integral inconclusive");

    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        const double u = u_grid[i];
        if (u == 0.0) {
            grid.phi[i] = {1.0, 0.0};
            grid.err[i] = 0.0;
            continue;
        }
        const auto it = std::lower_bound(mags.begin(), mags.end(), std::abs(u));
        const std::size_t m = static_cast<std::size_t>(it - mags.begin());
        grid.phi[i] = u > 0.0 ? phi_mag[m] : std::conj(phi_mag[m]);
        grid.err[i] = err_mag[m];
    }
    return grid;
}

CharFnGrid empirical_charfn(std::span<const double> samples,
                            std::vector<double> u_grid, int threads) {
    if (samples.empty())
        throw std::invalid_argument("empirical_charfn: no samples");
    std::sort(u_grid.begin(), u_grid.end());
    CharFnGrid grid;
    grid.u = u_grid;
    grid.phi.assign(u_grid.size(), cplx{0.0, 0.0});
    grid.err.assign(u_grid.size(), 0.0);
    grid.meta["route"] = "empirical";
    grid.meta["n"] = std::to_string(samples.size());
    const double n = static_cast<double>(samples.size());
    parallel_for(u_grid.size(), threads, [&](std::size_t i) {
        const double u = grid.u[i];
        if (u == 0.0) {
            grid.phi[i] = {1.0, 0.0};
            return;
        }
        const double au = std::abs(u);
        const double c = pairwise_transform_sum(samples, [au](double s) {
            return std::cos(au * s);
        });
        const double sgn = u > 0.0 ? 1.0 : -1.0;
        const double s = pairwise_transform_sum(samples, [au](double v) {
            return std::sin(au * v);
        });
        cplx value{c / n, sgn * s / n};
        const double mod = std::abs(value);
        if (mod > 1.0) value /= mod;
        grid.phi[i] = value;
        grid.err[i] = 0.0;
    });
    return grid;
}

namespace {

// In-place iterative radix-2 FFT (forward: e^{-2 pi i k m / N}).
void fft_radix2(std::vector<cplx>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * kPi / static_cast<double>(len);
        const cplx wl = std::polar(1.0, ang);
        for (std::size_t i = 0; i < n; i += len) {
            cplx w{1.0, 0.0};
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

double taper_weight(double u, double u_max, double fraction) {
    if (fraction <= 0.0) return 1.0;
    const double start = (1.0 - fraction) * u_max;
    if (u <= start) return 1.0;
    const double z = (u - start) / (u_max - start);
    const double c = std::cos(0.5 * kPi * z);
    return c * c;
}

// Nonnegative-u view of the grid (the half-line is all the inversion needs
// for a real-valued law).
struct HalfGrid {
    std::vector<double> u;
    std::vector<cplx> phi;
};

HalfGrid half_grid(const CharFnGrid& cf, double atom) {
    HalfGrid h;
    for (std::size_t i = 0; i < cf.u.size(); ++i) {
        if (cf.u[i] < 0.0) continue;
        h.u.push_back(cf.u[i]);
        h.phi.push_back(cf.phi[i] - atom);
    }
    if (h.u.size() < 2)
        throw std::invalid_argument("invert_density: grid needs u >= 0 coverage");
    return h;
}

} // namespace

DensityResult invert_density(const CharFnGrid& cf, std::vector<double> x_grid,
                             const InvertOptions& opts) {
    std::sort(x_grid.begin(), x_grid.end());
    DensityResult out;
    out.x = x_grid;
    out.density.assign(x_grid.size(), 0.0);

    HalfGrid h = half_grid(cf, opts.atom_mass);
    const double u_max = h.u.back();
    const double boundary = std::abs(h.phi.back());
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", boundary);
    out.meta["boundary_modulus"] = buf;
    if (boundary >= 1e-6) {
        if (opts.strict)
            throw RefusedError("invert_density: |phi| at the grid boundary is " +
                               std::string(buf) + " >= 1e-6");
        out.meta["boundary_warning"] =
            "transform not negligible at the grid boundary; widen the grid";
    }
    for (std::size_t i = 0; i < h.u.size(); ++i)
        h.phi[i] *= taper_weight(h.u[i], u_max, opts.taper_fraction);

    if (opts.method == InversionMethod::gil_pelaez) {
        out.meta["method"] = "gil-pelaez";
        // f(x) = (1/pi) int_0^U Re[(phi(u) - atom) e^{-iux}] du, trapezoid on
        // the stored grid.
        parallel_for(x_grid.size(), opts.threads, [&](std::size_t j) {
            const double x = x_grid[j];
            double acc = 0.0;
            double prev = (h.phi[0] * std::polar(1.0, -h.u[0] * x)).real();
            for (std::size_t i = 1; i < h.u.size(); ++i) {
                const double cur = (h.phi[i] * std::polar(1.0, -h.u[i] * x)).real();
                acc += 0.5 * (prev + cur) * (h.u[i] - h.u[i - 1]);
                prev = cur;
            }
            out.density[j] = acc / kPi;
        });
    } else {
        out.meta["method"] = "fft-grid";
        const std::size_t N = h.u.size();
        const double du = h.u[1] - h.u[0];
        for (std::size_t i = 1; i < N; ++i)
            if (std::abs(h.u[i] - h.u[i - 1] - du) > 1e-9 * du)
                throw std::invalid_argument("invert_density: fft-grid needs uniform u spacing");
        if (h.u.front() != 0.0)
            throw std::invalid_argument("invert_density: fft-grid needs the grid to start at u = 0");
        std::size_t M = 1;
        while (M < 4 * N) M <<= 1;
        const double x_span = 2.0 * kPi / du;
        const double dx = x_span / static_cast<double>(M);
        if (x_grid.front() < -0.5 * x_span || x_grid.back() > 0.5 * x_span)
            throw std::invalid_argument("invert_density: requested x beyond pi/du; refine du");
        std::vector<cplx> z(M, cplx{0.0, 0.0});
        for (std::size_t i = 0; i < N; ++i) z[i] = h.phi[i];
        fft_radix2(z);
        // f(x_m) = (du/pi) Re[DFT_m - z_0/2], x_m = m dx (wrapping to negative
        // x for m > M/2); endpoint weight from the trapezoid rule, the far
        // endpoint being negligible after the taper.
        const auto value_at = [&](std::size_t m) {
            return (z[m].real() - 0.5 * h.phi[0].real()) * du / kPi;
        };
        // Linear interpolation onto the requested grid.
        for (std::size_t j = 0; j < x_grid.size(); ++j) {
            double x = x_grid[j];
            double pos = x / dx;
            if (pos < 0.0) pos += static_cast<double>(M);
            const std::size_t m0 = static_cast<std::size_t>(pos) % M;
            const std::size_t m1 = (m0 + 1) % M;
            const double frac = pos - std::floor(pos);
            out.density[j] = (1.0 - frac) * value_at(m0) + frac * value_at(m1);
        }
    }

    // Negative lobes are inversion artifacts; clip and account for them.
    double clipped = 0.0;
    for (std::size_t j = 0; j < out.density.size(); ++j) {
        if (out.density[j] < 0.0) {
            if (j + 1 < out.density.size())
                clipped += -out.density[j] * (out.x[j + 1] - out.x[j]);
            out.density[j] = 0.0;
        }
    }
    out.clipped_mass = clipped;
    double mass = 0.0;
    for (std::size_t j = 1; j < out.density.size(); ++j)
        mass += 0.5 * (out.density[j] + out.density[j - 1]) * (out.x[j] - out.x[j - 1]);
    out.trapezoid_mass = mass;
    return out;
}

void write_csv(std::ostream& out, const CharFnGrid& grid) {
    out << "u,re,im,err\n";
    char buf[140];
    for (std::size_t i = 0; i < grid.u.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", grid.u[i],
                      grid.phi[i].real(), grid.phi[i].imag(), grid.err[i]);
        out << buf;
    }
}

CharFnGrid read_charfn_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("charfn csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "u,re,im,err")
        throw std::invalid_argument("charfn csv: expected header 'u,re,im,err'");
    CharFnGrid grid;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double u, re, im, err;
        if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg", &u, &re, &im, &err) != 4)
            throw std::invalid_argument("charfn csv: malformed row '" + line + "'");
        grid.u.push_back(u);
        grid.phi.emplace_back(re, im);
        grid.err.push_back(err);
    }
    return grid;
}

void write_csv(std::ostream& out, const DensityResult& result) {
    out << "x,density\n";
    char buf[80];
    for (std::size_t i = 0; i < result.x.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", result.x[i],
                      result.density[i]);
        out << buf;
    }
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    if (count < 2 || !(hi > lo))
        throw std::invalid_argument("linspace: need hi > lo and count >= 2");
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return v;
}

} // namespace shotnoise::spectral
