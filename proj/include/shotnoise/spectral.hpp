#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "shotnoise/kernels.hpp"

namespace shotnoise::spectral {

struct CharFnGrid {
    std::vector<double> u;                    // sorted
    std::vector<std::complex<double>> phi;
    std::vector<double> err;                  // per-point estimate
    std::map<std::string, std::string> meta;
};

struct CharFnOptions {
    double tol = 1e-7;
    int threads = 1;
    // Forces the two-dimensional centered-integrand evaluation even when the
    // kernel is x*g(t) and the jump law has a closed-form transform.
    bool force_general_route = false;
    kernels::IntegrationOptions integration{};
};

// Characteristic function of the series value on the given grid. Refuses
// (throws series-level errors) when the existence integral diverges or the
// centering constant does not converge. phi(0) = 1 exactly; values at -u are
// exact conjugates of the value at u.
CharFnGrid charfn(const kernels::Kernel& k, const stochastic::JumpLaw& sigma,
                  double rate, std::vector<double> u_grid,
                  const CharFnOptions& opts = {});

// (1/n) sum_j e^{i u s_j} with pairwise summation; Hermitian by construction
// and clamped to the unit disk (roundoff can overshoot by ~1e-16).
CharFnGrid empirical_charfn(std::span<const double> samples,
                            std::vector<double> u_grid, int threads = 1);

enum class InversionMethod { gil_pelaez, fft_grid };

struct InvertOptions {
    InversionMethod method = InversionMethod::gil_pelaez;
    // Known point mass at zero, subtracted before inversion so the continuous
    // part has a decaying transform.
    double atom_mass = 0.0;
    // Raised-cosine roll-off applied to the top fraction of the u-range to
    // suppress truncation ringing.
    double taper_fraction = 0.2;
    bool strict = false; // refuse instead of warn when the tail is too large
    int threads = 1;
};

struct DensityResult {
    std::vector<double> x;
    std::vector<double> density;  // continuous part; integrates to ~1 - atom
    double clipped_mass = 0.0;    // negative artifacts removed
    double trapezoid_mass = 0.0;
    std::map<std::string, std::string> meta;
};

// Fourier inversion of the continuous part on the requested x grid. The grid
// must reach far enough that |phi - atom| at the boundary is < 1e-6; otherwise
// a warning lands in meta (or the call refuses in strict mode).
DensityResult invert_density(const CharFnGrid& cf, std::vector<double> x_grid,
                             const InvertOptions& opts = {});

// CSV: u,re,im,err (grid) and x,density (result).
void write_csv(std::ostream& out, const CharFnGrid& grid);
CharFnGrid read_charfn_csv(std::istream& in);
void write_csv(std::ostream& out, const DensityResult& result);

// Evenly spaced grid helper: count points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t count);

} // namespace shotnoise::spectral
