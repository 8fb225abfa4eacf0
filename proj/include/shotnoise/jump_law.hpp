#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shotnoise/rng.hpp"

namespace shotnoise::stochastic {

namespace detail {
class JumpLawImpl;
}

// Jump size distribution. Every built-in family puts no mass at 0 by
// construction. Capabilities beyond sampling (density, cdf, closed-form
// characteristic function, atom list) are optional and queried before use;
// integration code falls back to Monte Carlo when they are absent.
//
// Immutable value type; cheap to copy, safe to share across threads.
class JumpLaw {
public:
    double sample(RngStream& stream) const;

    bool has_density() const;
    double density(double x) const;

    bool has_cdf() const;
    double cdf(double x) const;

    bool has_charfn() const;
    std::complex<double> charfn(double u) const;

    bool is_discrete() const;
    // Atoms sorted by location; only valid for discrete laws.
    const std::vector<std::pair<double, double>>& atoms() const;

    // E|X|; used for integral tail bounds.
    double mean_abs() const;

    // Support hull (may be +/- infinity at either end).
    std::pair<double, double> support() const;

    // Finite [lo, hi] carrying all but at most eps of the mass.
    std::pair<double, double> quantile_box(double eps) const;

    const std::string& id() const;

    // Same sampler with density/cdf/charfn/atom capabilities hidden; lets
    // tests exercise the Monte Carlo integration route on known laws.
    JumpLaw sampler_only() const;

    static JumpLaw exponential(double rate);
    static JumpLaw uniform(double lo, double hi);
    // Uniform on [-outer,-inner] U [inner,outer], 0 < inner < outer.
    static JumpLaw symmetric_uniform(double inner, double outer);
    // 1 + Exp(rate), supported on [1, inf).
    static JumpLaw shifted_exponential(double rate);
    // Finite discrete law; every location must be nonzero.
    static JumpLaw discrete(std::vector<std::pair<double, double>> atoms);
    // Normal resampled on the null event {X == 0.0}.
    static JumpLaw normal_nonzero(double mean, double stddev);

private:
    explicit JumpLaw(std::shared_ptr<const detail::JumpLawImpl> impl);
    std::shared_ptr<const detail::JumpLawImpl> impl_;
};

} // namespace shotnoise::stochastic
