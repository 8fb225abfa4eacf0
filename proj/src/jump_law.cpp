#include "shotnoise/jump_law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shotnoise::stochastic {

namespace detail {

class JumpLawImpl {
public:
    virtual ~JumpLawImpl() = default;
    virtual double sample(RngStream&) const = 0;
    virtual bool has_density() const { return false; }
    virtual double density(double) const {
        throw std::logic_error("jump law has no density");
    }
    virtual bool has_cdf() const { return false; }
    virtual double cdf(double) const { throw std::logic_error("jump law has no cdf"); }
    virtual bool has_charfn() const { return false; }
    virtual std::complex<double> charfn(double) const {
        throw std::logic_error("jump law has no closed-form charfn");
    }
    virtual bool is_discrete() const { return false; }
    virtual const std::vector<std::pair<double, double>>& atoms() const {
        throw std::logic_error("jump law is not discrete");
    }
    virtual double mean_abs() const = 0;
    virtual std::pair<double, double> support() const = 0;
    virtual std::pair<double, double> quantile_box(double eps) const = 0;
    virtual const std::string& id() const { return id_; }

protected:
    std::string id_;
};

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class ExponentialLaw final : public JumpLawImpl {
public:
    explicit ExponentialLaw(double rate) : rate_(rate) {
        if (!(rate > 0.0) || !std::isfinite(rate))
            throw std::invalid_argument("exponential jump law: rate must be positive");
        id_ = "exp(rate=" + std::to_string(rate) + ")";
    }
    double sample(RngStream& s) const override { return s.exponential(rate_); }
    bool has_density() const override { return true; }
    double density(double x) const override {
        return x > 0.0 ? rate_ * std::exp(-rate_ * x) : 0.0;
    }
    bool has_cdf() const override { return true; }
    double cdf(double x) const override {
        return x > 0.0 ? -std::expm1(-rate_ * x) : 0.0;
    }
    bool has_charfn() const override { return true; }
    std::complex<double> charfn(double u) const override {
        return rate_ / std::complex<double>(rate_, -u);
    }
    double mean_abs() const override { return 1.0 / rate_; }
    std::pair<double, double> support() const override { return {0.0, kInf}; }
    std::pair<double, double> quantile_box(double eps) const override {
        return {0.0, -std::log(eps) / rate_};
    }

private:
    double rate_;
};

class UniformLaw final : public JumpLawImpl {
public:
    UniformLaw(double lo, double hi) : lo_(lo), hi_(hi) {
        if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw std::invalid_argument("uniform jump law: need lo < hi, finite");
        id_ = "uniform[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
    }
    double sample(RngStream& s) const override { return s.uniform(lo_, hi_); }
    bool has_density() const override { return true; }
    double density(double x) const override {
        return (x >= lo_ && x <= hi_) ? 1.0 / (hi_ - lo_) : 0.0;
    }
    bool has_cdf() const override { return true; }
    double cdf(double x) const override {
        if (x <= lo_) return 0.0;
        if (x >= hi_) return 1.0;
        return (x - lo_) / (hi_ - lo_);
    }
    bool has_charfn() const override { return true; }
    std::complex<double> charfn(double u) const override {
        if (u == 0.0) return {1.0, 0.0};
        const double w = hi_ - lo_;
        // (e^{iu hi} - e^{iu lo}) / (iu w), written to stay stable for small u.
        const double m = 0.5 * (lo_ + hi_);
        const double half = 0.5 * w * u;
        const double sinc = std::abs(half) < 1e-8
                                ? 1.0 - half * half / 6.0
                                : std::sin(half) / half;
        return std::polar(sinc, u * m);
    }
    double mean_abs() const override {
        if (lo_ >= 0.0) return 0.5 * (lo_ + hi_);
        if (hi_ <= 0.0) return -0.5 * (lo_ + hi_);
        return 0.5 * (lo_ * lo_ + hi_ * hi_) / (hi_ - lo_);
    }
    std::pair<double, double> support() const override { return {lo_, hi_}; }
    std::pair<double, double> quantile_box(double) const override { return {lo_, hi_}; }

private:
    double lo_, hi_;
};

class SymmetricUniformLaw final : public JumpLawImpl {
public:
    SymmetricUniformLaw(double inner, double outer) : a_(inner), b_(outer) {
        if (!(0.0 < inner && inner < outer) || !std::isfinite(outer))
            throw std::invalid_argument("symmetric uniform jump law: need 0 < inner < outer");
        id_ = "symuniform[" + std::to_string(inner) + "," + std::to_string(outer) + "]";
    }
    double sample(RngStream& s) const override {
        const double u = s.u01();
        if (u < 0.5) return -(a_ + (b_ - a_) * (2.0 * u));
        return a_ + (b_ - a_) * (2.0 * u - 1.0);
    }
    bool has_density() const override { return true; }
    double density(double x) const override {
        const double ax = std::abs(x);
        return (ax >= a_ && ax <= b_) ? 0.5 / (b_ - a_) : 0.0;
    }
    bool has_cdf() const override { return true; }
    double cdf(double x) const override {
        if (x <= -b_) return 0.0;
        if (x < -a_) return 0.5 * (x + b_) / (b_ - a_);
        if (x < a_) return 0.5;
        if (x < b_) return 0.5 + 0.5 * (x - a_) / (b_ - a_);
        return 1.0;
    }
    bool has_charfn() const override { return true; }
    std::complex<double> charfn(double u) const override {
        if (u == 0.0) return {1.0, 0.0};
        // Real by symmetry: (sin(u b) - sin(u a)) / (u (b - a)).
        return {(std::sin(u * b_) - std::sin(u * a_)) / (u * (b_ - a_)), 0.0};
    }
    double mean_abs() const override { return 0.5 * (a_ + b_); }
    std::pair<double, double> support() const override { return {-b_, b_}; }
    std::pair<double, double> quantile_box(double) const override { return {-b_, b_}; }

private:
    double a_, b_;
};

class ShiftedExponentialLaw final : public JumpLawImpl {
public:
    explicit ShiftedExponentialLaw(double rate) : rate_(rate) {
        if (!(rate > 0.0) || !std::isfinite(rate))
            throw std::invalid_argument("shifted exponential jump law: rate must be positive");
        id_ = "shiftedexp(rate=" + std::to_string(rate) + ")";
    }
    double sample(RngStream& s) const override { return 1.0 + s.exponential(rate_); }
    bool has_density() const override { return true; }
    double density(double x) const override {
        return x > 1.0 ? rate_ * std::exp(-rate_ * (x - 1.0)) : 0.0;
    }
    bool has_cdf() const override { return true; }
    double cdf(double x) const override {
        return x > 1.0 ? -std::expm1(-rate_ * (x - 1.0)) : 0.0;
    }
    bool has_charfn() const override { return true; }
    std::complex<double> charfn(double u) const override {
        return std::polar(1.0, u) * (rate_ / std::complex<double>(rate_, -u));
    }
    double mean_abs() const override { return 1.0 + 1.0 / rate_; }
    std::pair<double, double> support() const override { return {1.0, kInf}; }
    std::pair<double, double> quantile_box(double eps) const override {
        return {1.0, 1.0 - std::log(eps) / rate_};
    }

private:
    double rate_;
};

class DiscreteLaw final : public JumpLawImpl {
public:
    explicit DiscreteLaw(std::vector<std::pair<double, double>> atoms)
        : atoms_(std::move(atoms)) {
        if (atoms_.empty())
            throw std::invalid_argument("discrete jump law: needs at least one atom");
        std::sort(atoms_.begin(), atoms_.end());
        double mass = 0.0;
        for (auto& [x, p] : atoms_) {
            if (x == 0.0)
                throw std::invalid_argument("discrete jump law: atom at 0 is not allowed");
            if (!(p > 0.0))
                throw std::invalid_argument("discrete jump law: weights must be positive");
            mass += p;
        }
        if (std::abs(mass - 1.0) > 1e-9)
            throw std::invalid_argument("discrete jump law: weights must sum to 1");
        cum_.reserve(atoms_.size());
        double c = 0.0;
        for (auto& [x, p] : atoms_) cum_.push_back(c += p);
        cum_.back() = 1.0;
        id_ = "discrete(" + std::to_string(atoms_.size()) + " atoms)";
    }
    double sample(RngStream& s) const override {
        const double u = s.u01();
        const auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
        return atoms_[static_cast<std::size_t>(it - cum_.begin())].first;
    }
    bool has_cdf() const override { return true; }
    double cdf(double x) const override {
        double c = 0.0;
        for (const auto& [loc, p] : atoms_) {
            if (loc > x) break;
            c += p;
        }
        return c;
    }
    bool has_charfn() const override { return true; }
    std::complex<double> charfn(double u) const override {
        std::complex<double> acc{0.0, 0.0};
        for (const auto& [x, p] : atoms_) acc += p * std::polar(1.0, u * x);
        return acc;
    }
    bool is_discrete() const override { return true; }
    const std::vector<std::pair<double, double>>& atoms() const override { return atoms_; }
    double mean_abs() const override {
        double m = 0.0;
        for (const auto& [x, p] : atoms_) m += p * std::abs(x);
        return m;
    }
    std::pair<double, double> support() const override {
        return {atoms_.front().first, atoms_.back().first};
    }
    std::pair<double, double> quantile_box(double) const override { return support(); }

private:
    std::vector<std::pair<double, double>> atoms_;
    std::vector<double> cum_;
};

class NormalNonzeroLaw final : public JumpLawImpl {
public:
    NormalNonzeroLaw(double mean, double sd) : mean_(mean), sd_(sd) {
        if (!(sd > 0.0) || !std::isfinite(sd) || !std::isfinite(mean))
            throw std::invalid_argument("normal jump law: stddev must be positive");
        id_ = "normal(" + std::to_string(mean) + "," + std::to_string(sd) + ")";
    }
    double sample(RngStream& s) const override {
        double x;
        do {
            x = mean_ + sd_ * s.normal();
        } while (x == 0.0); // the conditioning removes only a null event
        return x;
    }
    bool has_density() const override { return true; }
    double density(double x) const override {
        const double z = (x - mean_) / sd_;
        return std::exp(-0.5 * z * z) / (sd_ * 2.50662827463100050241576528481105);
    }
    bool has_cdf() const override { return true; }
    double cdf(double x) const override {
        return 0.5 * std::erfc(-(x - mean_) / (sd_ * 1.41421356237309504880168872420970));
    }
    bool has_charfn() const override { return true; }
    std::complex<double> charfn(double u) const override {
        return std::polar(std::exp(-0.5 * sd_ * sd_ * u * u), mean_ * u);
    }
    double mean_abs() const override {
        // E|X| for X ~ N(mean, sd^2).
        const double z = mean_ / sd_;
        const double phi = std::exp(-0.5 * z * z) / 2.50662827463100050241576528481105;
        const double Phi = 0.5 * std::erfc(-z / 1.41421356237309504880168872420970);
        return sd_ * 2.0 * phi + mean_ * (2.0 * Phi - 1.0);
    }
    std::pair<double, double> support() const override { return {-kInf, kInf}; }
    std::pair<double, double> quantile_box(double eps) const override {
        const double z = std::sqrt(-2.0 * std::log(0.5 * eps)) + 1.0;
        return {mean_ - sd_ * z, mean_ + sd_ * z};
    }

private:
    double mean_, sd_;
};

// Forwards sampling only; hides every analytic capability.
class SamplerOnlyLaw final : public JumpLawImpl {
public:
    explicit SamplerOnlyLaw(std::shared_ptr<const JumpLawImpl> inner)
        : inner_(std::move(inner)) {
        id_ = "opaque(" + inner_->id() + ")";
    }
    double sample(RngStream& s) const override { return inner_->sample(s); }
    double mean_abs() const override { return inner_->mean_abs(); }
    std::pair<double, double> support() const override { return inner_->support(); }
    std::pair<double, double> quantile_box(double eps) const override {
        return inner_->quantile_box(eps);
    }

private:
    std::shared_ptr<const JumpLawImpl> inner_;
};

} // namespace
} // namespace detail

using detail::JumpLawImpl;

JumpLaw::JumpLaw(std::shared_ptr<const JumpLawImpl> impl) : impl_(std::move(impl)) {}

double JumpLaw::sample(RngStream& stream) const { return impl_->sample(stream); }
bool JumpLaw::has_density() const { return impl_->has_density(); }
double JumpLaw::density(double x) const { return impl_->density(x); }
bool JumpLaw::has_cdf() const { return impl_->has_cdf(); }
double JumpLaw::cdf(double x) const { return impl_->cdf(x); }
bool JumpLaw::has_charfn() const { return impl_->has_charfn(); }
std::complex<double> JumpLaw::charfn(double u) const { return impl_->charfn(u); }
bool JumpLaw::is_discrete() const { return impl_->is_discrete(); }
const std::vector<std::pair<double, double>>& JumpLaw::atoms() const {
    return impl_->atoms();
}
double JumpLaw::mean_abs() const { return impl_->mean_abs(); }
std::pair<double, double> JumpLaw::support() const { return impl_->support(); }
std::pair<double, double> JumpLaw::quantile_box(double eps) const {
    return impl_->quantile_box(eps);
}
const std::string& JumpLaw::id() const { return impl_->id(); }

JumpLaw JumpLaw::sampler_only() const {
    return JumpLaw(std::make_shared<detail::SamplerOnlyLaw>(impl_));
}

JumpLaw JumpLaw::exponential(double rate) {
    return JumpLaw(std::make_shared<detail::ExponentialLaw>(rate));
}
JumpLaw JumpLaw::uniform(double lo, double hi) {
    return JumpLaw(std::make_shared<detail::UniformLaw>(lo, hi));
}
JumpLaw JumpLaw::symmetric_uniform(double inner, double outer) {
    return JumpLaw(std::make_shared<detail::SymmetricUniformLaw>(inner, outer));
}
JumpLaw JumpLaw::shifted_exponential(double rate) {
    return JumpLaw(std::make_shared<detail::ShiftedExponentialLaw>(rate));
}
JumpLaw JumpLaw::discrete(std::vector<std::pair<double, double>> atoms) {
    return JumpLaw(std::make_shared<detail::DiscreteLaw>(std::move(atoms)));
}
JumpLaw JumpLaw::normal_nonzero(double mean, double stddev) {
    return JumpLaw(std::make_shared<detail::NormalNonzeroLaw>(mean, stddev));
}

} // namespace shotnoise::stochastic
