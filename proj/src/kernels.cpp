#include "shotnoise/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shotnoise/quadrature.hpp"
#include "shotnoise/rng.hpp"

namespace shotnoise::kernels {

namespace detail {

class KernelImpl {
public:
    virtual ~KernelImpl() = default;
    virtual double eval(double t, double x) const = 0;
    virtual bool has_time_derivative() const { return false; }
    virtual double time_derivative(double, double) const {
        throw std::logic_error("kernel has no time derivative");
    }
    virtual bool has_space_derivative() const { return false; }
    virtual double space_derivative(double, double) const {
        throw std::logic_error("kernel has no space derivative");
    }
    virtual std::optional<double> abs_tail(double, double) const { return {}; }
    virtual std::optional<double> sat_sq_tail(double, double) const { return {}; }
    virtual std::vector<double> time_splits(double) const { return {}; }
    virtual std::optional<LinearProfile> linear_profile() const { return {}; }
    const std::string& id() const { return id_; }

protected:
    std::string id_;
};

namespace {

double ipow(double x, int q) {
    double r = 1.0;
    for (int i = 0; i < q; ++i) r *= x;
    return r;
}

class MonomialProductKernel final : public KernelImpl {
public:
    MonomialProductKernel(int q, TimeFunction g) : q_(q), g_(std::move(g)) {
        if (q < 1) throw std::invalid_argument("monomial kernel: q must be >= 1");
        id_ = (q_ == 1 ? std::string("x*") : "x^" + std::to_string(q_) + "*") + g_.id();
    }
    double eval(double t, double x) const override { return ipow(x, q_) * g_.eval(t); }
    bool has_time_derivative() const override { return g_.has_derivative(); }
    double time_derivative(double t, double x) const override {
        return ipow(x, q_) * g_.derivative(t);
    }
    bool has_space_derivative() const override { return true; }
    double space_derivative(double t, double x) const override {
        return q_ * ipow(x, q_ - 1) * g_.eval(t);
    }
    std::optional<double> abs_tail(double T, double x) const override {
        const auto tail = g_.abs_tail(T);
        if (!tail) return {};
        return std::abs(ipow(x, q_)) * *tail;
    }
    std::optional<double> sat_sq_tail(double T, double x) const override {
        const auto tail = g_.sq_tail(T);
        if (!tail) return {};
        return ipow(x, q_) * ipow(x, q_) * *tail;
    }
    std::vector<double> time_splits(double x) const override {
        std::vector<double> s = g_.breakpoints();
        const double ax = std::abs(ipow(x, q_));
        if (ax > 0.0)
            if (auto c = g_.abs_level_crossing(1.0 / ax)) s.push_back(*c);
        return s;
    }
    std::optional<LinearProfile> linear_profile() const override {
        if (q_ != 1) return {};
        return LinearProfile{g_, {}};
    }

private:
    int q_;
    TimeFunction g_;
};

class TimeWindowKernel final : public KernelImpl {
public:
    TimeWindowKernel(Kernel inner, double t0) : inner_(std::move(inner)), t0_(t0) {
        if (!(t0 > 0.0)) throw std::invalid_argument("time window kernel: t0 must be > 0");
        id_ = inner_.id() + "*1[t<=" + std::to_string(t0) + "]";
    }
    double eval(double t, double x) const override {
        return t <= t0_ ? inner_.eval(t, x) : 0.0;
    }
    bool has_time_derivative() const override { return inner_.has_time_derivative(); }
    double time_derivative(double t, double x) const override {
        return t <= t0_ ? inner_.time_derivative(t, x) : 0.0;
    }
    bool has_space_derivative() const override { return inner_.has_space_derivative(); }
    double space_derivative(double t, double x) const override {
        return t <= t0_ ? inner_.space_derivative(t, x) : 0.0;
    }
    std::optional<double> abs_tail(double T, double x) const override {
        if (T >= t0_) return 0.0;
        return inner_.abs_tail(T, x);
    }
    std::optional<double> sat_sq_tail(double T, double x) const override {
        if (T >= t0_) return 0.0;
        return inner_.sat_sq_tail(T, x);
    }
    std::vector<double> time_splits(double x) const override {
        std::vector<double> s = inner_.time_splits(x);
        s.push_back(t0_);
        return s;
    }
    std::optional<LinearProfile> linear_profile() const override {
        auto p = inner_.linear_profile();
        if (!p) return {};
        const double w = p->window ? std::min(*p->window, t0_) : t0_;
        return LinearProfile{p->g, w};
    }

private:
    Kernel inner_;
    double t0_;
};

class BigJumpWindowKernel final : public KernelImpl {
public:
    explicit BigJumpWindowKernel(Kernel inner) : inner_(std::move(inner)) {
        id_ = inner_.id() + "*1[|x|>=1]";
    }
    double eval(double t, double x) const override {
        return std::abs(x) >= 1.0 ? inner_.eval(t, x) : 0.0;
    }
    bool has_time_derivative() const override { return inner_.has_time_derivative(); }
    double time_derivative(double t, double x) const override {
        return std::abs(x) >= 1.0 ? inner_.time_derivative(t, x) : 0.0;
    }
    bool has_space_derivative() const override { return inner_.has_space_derivative(); }
    double space_derivative(double t, double x) const override {
        return std::abs(x) >= 1.0 ? inner_.space_derivative(t, x) : 0.0;
    }
    std::optional<double> abs_tail(double T, double x) const override {
        if (std::abs(x) < 1.0) return 0.0;
        return inner_.abs_tail(T, x);
    }
    std::optional<double> sat_sq_tail(double T, double x) const override {
        if (std::abs(x) < 1.0) return 0.0;
        return inner_.sat_sq_tail(T, x);
    }
    std::vector<double> time_splits(double x) const override {
        return inner_.time_splits(x);
    }

private:
    Kernel inner_;
};

// g(t) + coeff * x * e^{-beta t}; the non-product family for tests of
// conditions that must not assume h(t,x) = x g(t).
class AdditiveKernel final : public KernelImpl {
public:
    AdditiveKernel(TimeFunction g, double coeff, double beta)
        : g_(std::move(g)), c_(coeff), b_(beta) {
        if (!(beta > 0.0)) throw std::invalid_argument("additive kernel: beta must be > 0");
        id_ = g_.id() + "+" + std::to_string(coeff) + "*x*exp(-" + std::to_string(beta) + "t)";
    }
    double eval(double t, double x) const override {
        return g_.eval(t) + c_ * x * std::exp(-b_ * t);
    }
    bool has_time_derivative() const override { return g_.has_derivative(); }
    double time_derivative(double t, double x) const override {
        return g_.derivative(t) - c_ * b_ * x * std::exp(-b_ * t);
    }
    bool has_space_derivative() const override { return true; }
    double space_derivative(double t, double) const override {
        return c_ * std::exp(-b_ * t);
    }
    std::optional<double> abs_tail(double T, double x) const override {
        const auto gt = g_.abs_tail(T);
        if (!gt) return {};
        return *gt + std::abs(c_ * x) * std::exp(-b_ * T) / b_;
    }
    std::optional<double> sat_sq_tail(double T, double x) const override {
        const auto gt = g_.sq_tail(T);
        if (!gt) return {};
        // (a+b)^2 <= 2a^2 + 2b^2
        return 2.0 * *gt + c_ * c_ * x * x * std::exp(-2.0 * b_ * T) / b_;
    }
    std::vector<double> time_splits(double) const override { return g_.breakpoints(); }

private:
    TimeFunction g_;
    double c_, b_;
};

} // namespace
} // namespace detail

Kernel::Kernel(std::shared_ptr<const detail::KernelImpl> impl) : impl_(std::move(impl)) {}

double Kernel::eval(double t, double x) const { return impl_->eval(t, x); }
bool Kernel::has_time_derivative() const { return impl_->has_time_derivative(); }
double Kernel::time_derivative(double t, double x) const {
    return impl_->time_derivative(t, x);
}
bool Kernel::has_space_derivative() const { return impl_->has_space_derivative(); }
double Kernel::space_derivative(double t, double x) const {
    return impl_->space_derivative(t, x);
}
std::optional<double> Kernel::abs_tail(double T, double x) const {
    return impl_->abs_tail(T, x);
}
std::optional<double> Kernel::sat_sq_tail(double T, double x) const {
    return impl_->sat_sq_tail(T, x);
}
std::vector<double> Kernel::time_splits(double x) const { return impl_->time_splits(x); }
std::optional<LinearProfile> Kernel::linear_profile() const {
    return impl_->linear_profile();
}
const std::string& Kernel::id() const { return impl_->id(); }

Kernel Kernel::product(TimeFunction g) {
    return Kernel(std::make_shared<detail::MonomialProductKernel>(1, std::move(g)));
}
Kernel Kernel::product_exp(double beta) {
    return product(TimeFunction::exponential(1.0, beta));
}
Kernel Kernel::product_power(double beta) {
    return product(TimeFunction::power(1.0, beta));
}
Kernel Kernel::monomial(int q, TimeFunction g) {
    return Kernel(std::make_shared<detail::MonomialProductKernel>(q, std::move(g)));
}
Kernel Kernel::time_window(Kernel inner, double t0) {
    return Kernel(std::make_shared<detail::TimeWindowKernel>(std::move(inner), t0));
}
Kernel Kernel::big_jump_window(Kernel inner) {
    return Kernel(std::make_shared<detail::BigJumpWindowKernel>(std::move(inner)));
}
Kernel Kernel::additive(TimeFunction g, double coeff, double beta) {
    return Kernel(std::make_shared<detail::AdditiveKernel>(std::move(g), coeff, beta));
}
Kernel Kernel::zero() { return product(TimeFunction::zero()); }

// ---------------------------------------------------------------------------
// Condition evaluators.

namespace {

using quadrature::TailStatus;
using stochastic::JumpLaw;
using stochastic::RngStream;

struct InnerOutcome {
    double value = 0.0;
    double error = 0.0;
    bool divergent = false;
    bool inconclusive = false;
};

// Inner t-integral at fixed x. `sat` selects (h^2 ^ 1) vs |h| as integrand and
// the matching tail bound.
template <class Integrand, class TailFn>
InnerOutcome inner_time_integral(const Integrand& f, const TailFn& tail, double tol,
                                 const std::vector<double>& splits,
                                 double divergence_threshold) {
    const auto r = quadrature::integrate_time_axis<double>(f, splits, tail, tol,
                                                           divergence_threshold);
    InnerOutcome o;
    o.value = r.value;
    o.error = r.error;
    o.divergent = r.status == TailStatus::divergent;
    o.inconclusive = r.status == TailStatus::inconclusive;
    return o;
}

struct OuterOutcome {
    double value = 0.0;
    double error = 0.0;
    bool divergent = false;
    bool inconclusive = false;
    std::string route;
};

// sigma-integral of x -> inner(x).  Discrete laws are summed exactly, laws
// with a density are integrated by adaptive quadrature over a quantile box,
// anything else falls back to Monte Carlo with a CLT error bar.
template <class InnerFn>
OuterOutcome outer_sigma_integral(const JumpLaw& sigma, const InnerFn& inner,
                                  const IntegrationOptions& opts) {
    OuterOutcome out;
    if (sigma.is_discrete()) {
        out.route = "exact-sum";
        for (const auto& [x, p] : sigma.atoms()) {
            const InnerOutcome io = inner(x);
            out.value += p * io.value;
            out.error += p * io.error;
            out.divergent |= io.divergent;
            out.inconclusive |= io.inconclusive;
        }
        return out;
    }
    if (sigma.has_density()) {
        out.route = "quadrature";
        const double box_eps = 1e-12;
        const auto [lo, hi] = sigma.quantile_box(box_eps);
        bool divergent = false, inconclusive = false;
        double inner_err = 0.0;
        const auto f = [&](double x) {
            const InnerOutcome io = inner(x);
            divergent |= io.divergent;
            inconclusive |= io.inconclusive;
            inner_err = std::max(inner_err, io.error);
            return sigma.density(x) * io.value;
        };
        std::vector<double> splits{-1.0, 1.0, 0.0};
        const auto r = quadrature::integrate<double>(f, lo, hi, opts.tol * 0.5, splits);
        out.value = r.value;
        // Outer truncation: the box carries all but box_eps of the mass; the
        // integrand seen at the box edges bounds what the tail can add.
        const double edge = std::max(std::abs(f(lo)), std::abs(f(hi)));
        out.error = r.error + inner_err + box_eps * (1.0 + edge);
        out.divergent = divergent;
        out.inconclusive = inconclusive;
        return out;
    }
    out.route = "monte-carlo";
    RngStream stream(opts.mc_seed, 0);
    const std::size_t n = std::max<std::size_t>(opts.mc_samples, 100);
    double sum = 0.0, sumsq = 0.0, inner_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const InnerOutcome io = inner(sigma.sample(stream));
        out.divergent |= io.divergent;
        out.inconclusive |= io.inconclusive;
        inner_err = std::max(inner_err, io.error);
        sum += io.value;
        sumsq += io.value * io.value;
    }
    out.value = sum / static_cast<double>(n);
    const double var =
        std::max(sumsq / static_cast<double>(n) - out.value * out.value, 0.0);
    out.error = 3.0 * std::sqrt(var / static_cast<double>(n)) + inner_err;
    return out;
}

ConditionReport finish_report(const OuterOutcome& out, double rate, double tol) {
    ConditionReport rep;
    rep.value = rate * out.value;
    rep.est_error = rate * out.error;
    rep.divergent = out.divergent;
    rep.converged = !out.divergent && !out.inconclusive && rep.est_error <= tol;
    rep.diagnostics["est_error"] = rep.est_error;
    rep.notes.push_back("outer route: " + out.route);
    if (out.inconclusive)
        rep.notes.push_back("time integral inconclusive: no tail bound and no decay");
    if (out.divergent) rep.notes.push_back("time integral exceeded divergence threshold");
    return rep;
}

} // namespace

ConditionReport l2_condition(const Kernel& k, const JumpLaw& sigma, double rate,
                             const IntegrationOptions& opts) {
    const auto inner = [&](double x) {
        const auto f = [&](double t) {
            const double h = k.eval(t, x);
            return std::min(h * h, 1.0);
        };
        const auto tail = [&](double T) { return k.sat_sq_tail(T, x); };
        return inner_time_integral(f, tail, opts.tol * 0.25, k.time_splits(x),
                                   opts.divergence_threshold);
    };
    return finish_report(outer_sigma_integral(sigma, inner, opts), rate, opts.tol);
}

ConditionReport l1_norm(const Kernel& k, const JumpLaw& sigma, double rate,
                        const IntegrationOptions& opts) {
    return l1_norm_from(k, sigma, rate, 0.0, opts);
}

ConditionReport l1_norm_from(const Kernel& k, const JumpLaw& sigma, double rate,
                             double from_t, const IntegrationOptions& opts) {
    const auto inner = [&](double x) {
        const auto f = [&](double t) { return std::abs(k.eval(from_t + t, x)); };
        const auto tail = [&](double T) { return k.abs_tail(from_t + T, x); };
        std::vector<double> splits;
        for (double s : k.time_splits(x))
            if (s > from_t) splits.push_back(s - from_t);
        return inner_time_integral(f, tail, opts.tol * 0.25, splits,
                                   opts.divergence_threshold);
    };
    return finish_report(outer_sigma_integral(sigma, inner, opts), rate, opts.tol);
}

ConditionReport centering_constant(const Kernel& k, const JumpLaw& sigma, double rate,
                                   double tol, const CenteringSchedule& schedule,
                                   const IntegrationOptions& opts) {
    ConditionReport rep;
    double acc = 0.0;
    double s_lo = 0.0;
    double s_hi = schedule.s0;
    int cauchy_hits = 0;
    for (int step = 0; step < schedule.max_steps; ++step) {
        const auto inner = [&](double x) {
            const auto f = [&](double t) {
                const double h = k.eval(t, x);
                return std::abs(h) <= 1.0 ? h : 0.0;
            };
            InnerOutcome o;
            const auto r =
                quadrature::integrate<double>(f, s_lo, s_hi, opts.tol * 0.25,
                                              k.time_splits(x));
            o.value = r.value;
            o.error = r.error;
            return o;
        };
        const OuterOutcome out = outer_sigma_integral(sigma, inner, opts);
        acc += rate * out.value;
        rep.est_error += rate * out.error;
        const double increment = std::abs(rate * out.value);
        rep.diagnostics["A_" + std::to_string(step)] = acc;

        // Early exit when the whole remaining integrand is provably small:
        // |h 1_{|h|<=1}| <= |h|.
        const auto abs_rem = [&]() -> std::optional<double> {
            const auto b = [&](double x) { return k.abs_tail(s_hi, x); };
            if (sigma.is_discrete()) {
                double total = 0.0;
                for (const auto& [x, p] : sigma.atoms()) {
                    const auto t = b(x);
                    if (!t) return std::nullopt;
                    total += p * *t;
                }
                return total;
            }
            return std::nullopt;
        }();
        if (abs_rem && rate * *abs_rem < tol) {
            rep.value = acc;
            rep.converged = true;
            rep.est_error += rate * *abs_rem;
            rep.diagnostics["steps"] = step + 1;
            return rep;
        }
        if (increment < tol) {
            if (++cauchy_hits >= 2) {
                rep.value = acc;
                rep.converged = true;
                rep.diagnostics["steps"] = step + 1;
                return rep;
            }
        } else {
            cauchy_hits = 0;
        }
        s_lo = s_hi;
        s_hi *= schedule.factor;
    }
    rep.value = acc;
    rep.converged = false;
    rep.notes.push_back("partial sums not Cauchy on the schedule; see A_* diagnostics");
    return rep;
}

SeriesRepresentation from_poisson_integral(const Kernel& f,
                                           const PoissonIntegralSpec& spec) {
    if (!(spec.big_jump_mass > 0.0) || !std::isfinite(spec.big_jump_mass))
        throw std::domain_error(
            "poisson integral: mass on big jumps must be positive and finite");
    return SeriesRepresentation{Kernel::big_jump_window(f), spec.big_jump_mass,
                                spec.big_jump_law};
}

} // namespace shotnoise::kernels
