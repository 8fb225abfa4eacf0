#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shotnoise/jump_law.hpp"
#include "shotnoise/time_function.hpp"

namespace shotnoise::kernels {

namespace detail {
class KernelImpl;
}

// h(t,x) = x * g(t), possibly cut off in time. The analytic fast paths
// (characteristic function via the jump law's closed-form transform) key on
// this structure.
struct LinearProfile {
    TimeFunction g;
    std::optional<double> window; // h = 0 for t > window when set
};

// Filter applied to a jump of size x that occurred t time units ago.
// Immutable; derivative and tail capabilities are declared per family so that
// integration code never guesses.
class Kernel {
public:
    double eval(double t, double x) const;

    bool has_time_derivative() const;
    double time_derivative(double t, double x) const; // a.e.; kinks excluded

    bool has_space_derivative() const;
    double space_derivative(double t, double x) const;

    // Upper bounds on int_T^inf |h(t,x)| dt and int_T^inf (h(t,x)^2 ^ 1) dt
    // at fixed x; nullopt when no finite bound is known.
    std::optional<double> abs_tail(double T, double x) const;
    std::optional<double> sat_sq_tail(double T, double x) const;

    // Kinks in t at fixed x: window edges, profile breakpoints and the
    // |h| = 1 crossing when the family exposes it.
    std::vector<double> time_splits(double x) const;

    std::optional<LinearProfile> linear_profile() const;

    const std::string& id() const;

    static Kernel product(TimeFunction g);                 // x * g(t)
    static Kernel product_exp(double beta);                // x * e^{-beta t}
    static Kernel product_power(double beta);              // x * (1+t)^{-beta}
    static Kernel monomial(int q, TimeFunction g);         // x^q * g(t), q >= 1
    static Kernel time_window(Kernel inner, double t0);    // f * 1_{[0,t0]}(t)
    static Kernel big_jump_window(Kernel inner);           // f * 1_{|x| >= 1}
    static Kernel additive(TimeFunction g, double coeff, double beta);
                                                           // g(t) + coeff*x*e^{-beta t}
    static Kernel zero();

private:
    explicit Kernel(std::shared_ptr<const detail::KernelImpl> impl);
    std::shared_ptr<const detail::KernelImpl> impl_;
};

// Outcome of a numerical condition evaluation. Divergence and non-convergence
// are report states, not exceptions: a failing existence integral is
// informative output.
struct ConditionReport {
    double value = 0.0;
    bool divergent = false;
    bool converged = false;
    double est_error = 0.0;
    std::map<std::string, double> diagnostics;
    std::vector<std::string> notes;
};

struct IntegrationOptions {
    double tol = 1e-6;
    double divergence_threshold = 1e8;
    std::size_t mc_samples = 200000;   // Monte Carlo fallback when sigma has
                                       // neither atoms nor a density
    std::uint64_t mc_seed = 0x5eedULL;
};

// r * int_0^inf int (h^2 ^ 1) dt sigma(dx): the existence integral of the
// series. Divergence and inconclusive tails are flagged in the report.
ConditionReport l2_condition(const Kernel& k, const stochastic::JumpLaw& sigma,
                             double rate, const IntegrationOptions& opts = {});

// r * int_0^inf int |h| dt sigma(dx).
ConditionReport l1_norm(const Kernel& k, const stochastic::JumpLaw& sigma,
                        double rate, const IntegrationOptions& opts = {});

// Same integral restricted to t >= from_t; used to validate truncation
// horizons.
ConditionReport l1_norm_from(const Kernel& k, const stochastic::JumpLaw& sigma,
                             double rate, double from_t,
                             const IntegrationOptions& opts = {});

struct CenteringSchedule {
    double s0 = 1.0;
    double factor = 2.0;
    int max_steps = 30;
};

// Centering constant: limit over s of A(s) = r * int_0^s int h 1_{|h|<=1},
// evaluated on a growing schedule with a Cauchy stopping rule. A non-Cauchy
// sequence comes back converged = false with the observed increments in the
// diagnostics.
ConditionReport centering_constant(const Kernel& k, const stochastic::JumpLaw& sigma,
                                   double rate, double tol,
                                   const CenteringSchedule& schedule = {},
                                   const IntegrationOptions& opts = {});

struct PoissonIntegralSpec {
    double big_jump_mass = 0.0;          // mass the driving measure puts on |x| >= 1
    stochastic::JumpLaw big_jump_law;    // that mass, normalized
};

struct SeriesRepresentation {
    Kernel kernel;
    double rate;
    stochastic::JumpLaw sigma;
};

// Rewrites an integral against the jump measure restricted to |x| >= 1 as a
// series sampler: kernel wrapped with the big-jump window, arrival rate equal
// to the big-jump mass, jumps from the normalized law.
SeriesRepresentation from_poisson_integral(const Kernel& f,
                                           const PoissonIntegralSpec& spec);

} // namespace shotnoise::kernels
