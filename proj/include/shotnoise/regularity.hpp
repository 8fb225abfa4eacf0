#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "shotnoise/kernels.hpp"

namespace shotnoise::regularity {

// Numerical surrogate checks for the smoothness sufficient conditions.
// Absolute continuity itself is not decidable from samples, so these report
// measured quantities against conservative thresholds and say so; the
// convolution diagnostic is explicitly indicative, never a verdict.
struct RegularityReport {
    std::string condition;
    enum class Verdict { pass, fail, inconclusive } verdict = Verdict::inconclusive;
    std::map<std::string, double> measured;
    std::size_t sample_size = 0;
    double tolerance = 0.0;
    std::vector<std::string> notes;

    std::string to_json() const;
};

struct TimeRange {
    double lo = 0.0;
    double hi = 1.0;
};

// i.i.d. draws of h(U, X) with U uniform on [0, t] and X from sigma: the
// normalized image of the kernel over the time window.
std::vector<double> pushforward_samples(const kernels::Kernel& k, double t,
                                        const stochastic::JumpLaw& sigma,
                                        std::size_t n, stochastic::RngStream& stream);
std::vector<double> pushforward_samples_batch(const kernels::Kernel& k, double t,
                                              const stochastic::JumpLaw& sigma,
                                              std::size_t n, std::uint64_t seed,
                                              int threads);

// Fraction of sampled (t, x) with |d/dt h| <= eps; passes when that fraction
// stays under `fail_fraction`.
RegularityReport check_time_derivative(const kernels::Kernel& k, TimeRange t_range,
                                       const stochastic::JumpLaw& sigma, std::size_t n,
                                       double eps, double fail_fraction,
                                       stochastic::RngStream& stream);

// Same for the squared space derivative (the 1x1 Gram determinant);
// inconclusive when sigma carries no density.
RegularityReport check_space_jacobian(const kernels::Kernel& k, TimeRange t_range,
                                      const stochastic::JumpLaw& sigma, std::size_t n,
                                      double eps, double fail_fraction,
                                      stochastic::RngStream& stream);

// Endpoint gap |g_n(a) - g(a)|, L1 gap of the derivatives on [a, b], and the
// measure of {|g'| <= eps}: the three quantities behind image-measure
// convergence for one-dimensional profiles. Pass needs the first two to
// decrease below tol along the sequence and the third to stay small.
RegularityReport check_sequence_derivatives(const std::vector<kernels::TimeFunction>& seq,
                                            const kernels::TimeFunction& limit,
                                            double a, double b, std::size_t n_grid,
                                            double tol, double eps,
                                            double zero_measure_threshold);

// Grid-histogram density of the image samples, self-convolved p times through
// the exact measure engine; reports concentration numbers only.
RegularityReport convolution_power_diagnostic(std::span<const double> samples,
                                              unsigned p, std::size_t grid_bins);

} // namespace shotnoise::regularity
