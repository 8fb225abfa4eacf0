#include "shotnoise/time_function.hpp"

#include <cmath>
#include <stdexcept>

namespace shotnoise::kernels {

namespace detail {

class TimeFunctionImpl {
public:
    virtual ~TimeFunctionImpl() = default;
    virtual double eval(double t) const = 0;
    virtual bool has_derivative() const { return true; }
    virtual double derivative(double t) const = 0;
    virtual std::optional<double> abs_tail(double T) const = 0;
    virtual std::optional<double> sq_tail(double T) const = 0;
    virtual std::vector<double> breakpoints() const { return {}; }
    virtual std::optional<double> abs_level_crossing(double) const { return {}; }
    const std::string& id() const { return id_; }

protected:
    std::string id_;
};

namespace {

class ExpProfile final : public TimeFunctionImpl {
public:
    ExpProfile(double scale, double beta) : s_(scale), b_(beta) {
        if (!(beta > 0.0)) throw std::invalid_argument("exp profile: beta must be > 0");
        id_ = "exp(scale=" + std::to_string(scale) + ",beta=" + std::to_string(beta) + ")";
    }
    double eval(double t) const override { return s_ * std::exp(-b_ * t); }
    double derivative(double t) const override { return -b_ * s_ * std::exp(-b_ * t); }
    std::optional<double> abs_tail(double T) const override {
        return std::abs(s_) * std::exp(-b_ * T) / b_;
    }
    std::optional<double> sq_tail(double T) const override {
        return s_ * s_ * std::exp(-2.0 * b_ * T) / (2.0 * b_);
    }
    std::optional<double> abs_level_crossing(double level) const override {
        if (s_ == 0.0 || level <= 0.0 || level >= std::abs(s_)) return {};
        return std::log(std::abs(s_) / level) / b_;
    }

private:
    double s_, b_;
};

class PowerProfile final : public TimeFunctionImpl {
public:
    PowerProfile(double scale, double beta) : s_(scale), b_(beta) {
        if (!(beta > 0.0)) throw std::invalid_argument("power profile: beta must be > 0");
        id_ = "power(scale=" + std::to_string(scale) + ",beta=" + std::to_string(beta) + ")";
    }
    double eval(double t) const override { return s_ * std::pow(1.0 + t, -b_); }
    double derivative(double t) const override {
        return -b_ * s_ * std::pow(1.0 + t, -b_ - 1.0);
    }
    std::optional<double> abs_tail(double T) const override {
        if (b_ <= 1.0) return {};
        return std::abs(s_) * std::pow(1.0 + T, 1.0 - b_) / (b_ - 1.0);
    }
    std::optional<double> sq_tail(double T) const override {
        if (b_ <= 0.5) return {};
        return s_ * s_ * std::pow(1.0 + T, 1.0 - 2.0 * b_) / (2.0 * b_ - 1.0);
    }
    std::optional<double> abs_level_crossing(double level) const override {
        if (s_ == 0.0 || level <= 0.0 || level >= std::abs(s_)) return {};
        return std::pow(std::abs(s_) / level, 1.0 / b_) - 1.0;
    }

private:
    double s_, b_;
};

class AffineProfile final : public TimeFunctionImpl {
public:
    AffineProfile(double c0, double c1) : c0_(c0), c1_(c1) {
        id_ = "affine(" + std::to_string(c0) + "," + std::to_string(c1) + ")";
    }
    double eval(double t) const override { return c0_ + c1_ * t; }
    double derivative(double) const override { return c1_; }
    std::optional<double> abs_tail(double) const override {
        if (c0_ == 0.0 && c1_ == 0.0) return 0.0;
        return {};
    }
    std::optional<double> sq_tail(double T) const override { return abs_tail(T); }

private:
    double c0_, c1_;
};

class QuadraticProfile final : public TimeFunctionImpl {
public:
    QuadraticProfile(double c0, double c1, double c2) : c0_(c0), c1_(c1), c2_(c2) {
        id_ = "quadratic(" + std::to_string(c0) + "," + std::to_string(c1) + "," +
              std::to_string(c2) + ")";
    }
    double eval(double t) const override { return c0_ + t * (c1_ + t * c2_); }
    double derivative(double t) const override { return c1_ + 2.0 * c2_ * t; }
    std::optional<double> abs_tail(double) const override {
        if (c0_ == 0.0 && c1_ == 0.0 && c2_ == 0.0) return 0.0;
        return {};
    }
    std::optional<double> sq_tail(double T) const override { return abs_tail(T); }

private:
    double c0_, c1_, c2_;
};

class IndicatorProfile final : public TimeFunctionImpl {
public:
    IndicatorProfile(double scale, double t0) : s_(scale), t0_(t0) {
        if (!(t0 > 0.0)) throw std::invalid_argument("indicator profile: t0 must be > 0");
        id_ = "indicator(scale=" + std::to_string(scale) + ",t0=" + std::to_string(t0) + ")";
    }
    double eval(double t) const override { return (t >= 0.0 && t <= t0_) ? s_ : 0.0; }
    double derivative(double) const override { return 0.0; } // a.e.
    std::optional<double> abs_tail(double T) const override {
        return std::abs(s_) * std::max(t0_ - std::max(T, 0.0), 0.0);
    }
    std::optional<double> sq_tail(double T) const override {
        return s_ * s_ * std::max(t0_ - std::max(T, 0.0), 0.0);
    }
    std::vector<double> breakpoints() const override { return {t0_}; }

private:
    double s_, t0_;
};

class PiecewiseConstantProfile final : public TimeFunctionImpl {
public:
    PiecewiseConstantProfile(std::vector<double> edges, std::vector<double> values)
        : edges_(std::move(edges)), values_(std::move(values)) {
        if (edges_.empty() || edges_.size() != values_.size())
            throw std::invalid_argument("piecewise profile: need one value per edge");
        double prev = 0.0;
        for (double e : edges_) {
            if (!(e > prev))
                throw std::invalid_argument("piecewise profile: edges must increase from 0");
            prev = e;
        }
        id_ = "piecewise(" + std::to_string(values_.size()) + " pieces)";
    }
    double eval(double t) const override {
        if (t < 0.0) return 0.0;
        for (std::size_t i = 0; i < edges_.size(); ++i)
            if (t < edges_[i]) return values_[i];
        return 0.0;
    }
    double derivative(double) const override { return 0.0; } // a.e.
    std::optional<double> abs_tail(double T) const override {
        double acc = 0.0, lo = 0.0;
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            const double a = std::max(lo, T), b = edges_[i];
            if (b > a) acc += std::abs(values_[i]) * (b - a);
            lo = b;
        }
        return acc;
    }
    std::optional<double> sq_tail(double T) const override {
        double acc = 0.0, lo = 0.0;
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            const double a = std::max(lo, T), b = edges_[i];
            if (b > a) acc += values_[i] * values_[i] * (b - a);
            lo = b;
        }
        return acc;
    }
    std::vector<double> breakpoints() const override { return edges_; }

private:
    std::vector<double> edges_;
    std::vector<double> values_;
};

} // namespace
} // namespace detail

TimeFunction::TimeFunction(std::shared_ptr<const detail::TimeFunctionImpl> impl)
    : impl_(std::move(impl)) {}

double TimeFunction::eval(double t) const { return impl_->eval(t); }
bool TimeFunction::has_derivative() const { return impl_->has_derivative(); }
double TimeFunction::derivative(double t) const { return impl_->derivative(t); }
std::optional<double> TimeFunction::abs_tail(double T) const { return impl_->abs_tail(T); }
std::optional<double> TimeFunction::sq_tail(double T) const { return impl_->sq_tail(T); }
std::vector<double> TimeFunction::breakpoints() const { return impl_->breakpoints(); }
std::optional<double> TimeFunction::abs_level_crossing(double level) const {
    return impl_->abs_level_crossing(level);
}
const std::string& TimeFunction::id() const { return impl_->id(); }

TimeFunction TimeFunction::exponential(double scale, double beta) {
    return TimeFunction(std::make_shared<detail::ExpProfile>(scale, beta));
}
TimeFunction TimeFunction::power(double scale, double beta) {
    return TimeFunction(std::make_shared<detail::PowerProfile>(scale, beta));
}
TimeFunction TimeFunction::affine(double c0, double c1) {
    return TimeFunction(std::make_shared<detail::AffineProfile>(c0, c1));
}
TimeFunction TimeFunction::quadratic(double c0, double c1, double c2) {
    return TimeFunction(std::make_shared<detail::QuadraticProfile>(c0, c1, c2));
}
TimeFunction TimeFunction::indicator(double scale, double t0) {
    return TimeFunction(std::make_shared<detail::IndicatorProfile>(scale, t0));
}
TimeFunction TimeFunction::piecewise_constant(std::vector<double> edges,
                                              std::vector<double> values) {
    return TimeFunction(std::make_shared<detail::PiecewiseConstantProfile>(
        std::move(edges), std::move(values)));
}

} // namespace shotnoise::kernels
