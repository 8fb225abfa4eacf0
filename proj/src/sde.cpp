#include "shotnoise/sde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shotnoise/arrivals.hpp"
#include "shotnoise/parallel.hpp"

namespace shotnoise::sde {

using stochastic::JumpLaw;
using stochastic::RngStream;

namespace detail {

class DriftImpl {
public:
    virtual ~DriftImpl() = default;
    virtual double eval(double x) const = 0;
    virtual double derivative(double x) const = 0;
    virtual bool monotone_near(double x0) const = 0;
    const std::string& id() const { return id_; }

protected:
    std::string id_;
};

namespace {

class AffineDrift final : public DriftImpl {
public:
    AffineDrift(double c0, double c1) : c0_(c0), c1_(c1) {
        id_ = "affine(" + std::to_string(c0) + "," + std::to_string(c1) + ")";
    }
    double eval(double x) const override { return c0_ + c1_ * x; }
    double derivative(double) const override { return c1_; }
    bool monotone_near(double) const override { return c1_ != 0.0; }

private:
    double c0_, c1_;
};

class DampedCubicDrift final : public DriftImpl {
public:
    explicit DampedCubicDrift(double lambda) : l_(lambda) {
        if (!(lambda > 0.0))
            throw std::invalid_argument("damped cubic drift: lambda must be > 0");
        id_ = "damped_cubic(lambda=" + std::to_string(lambda) + ")";
    }
    double eval(double x) const override { return -x * x * x - l_ * x; }
    double derivative(double x) const override { return -3.0 * x * x - l_; }
    bool monotone_near(double) const override { return true; } // strictly decreasing

private:
    double l_;
};

class LogisticDrift final : public DriftImpl {
public:
    LogisticDrift(double scale, double steepness, double midpoint)
        : s_(scale), k_(steepness), m_(midpoint) {
        if (!(steepness > 0.0) || scale == 0.0)
            throw std::invalid_argument("logistic drift: need steepness > 0, scale != 0");
        id_ = "logistic(" + std::to_string(scale) + "," + std::to_string(steepness) +
              "," + std::to_string(midpoint) + ")";
    }
    double eval(double x) const override {
        return s_ / (1.0 + std::exp(-k_ * (x - m_)));
    }
    double derivative(double x) const override {
        const double e = std::exp(-k_ * (x - m_));
        const double d = 1.0 + e;
        return s_ * k_ * e / (d * d);
    }
    bool monotone_near(double) const override { return true; }

private:
    double s_, k_, m_;
};

} // namespace
} // namespace detail

DriftSpec::DriftSpec(std::shared_ptr<const detail::DriftImpl> impl)
    : impl_(std::move(impl)) {}

double DriftSpec::eval(double x) const { return impl_->eval(x); }
double DriftSpec::derivative(double x) const { return impl_->derivative(x); }
bool DriftSpec::monotone_near(double x0) const { return impl_->monotone_near(x0); }
const std::string& DriftSpec::id() const { return impl_->id(); }

DriftSpec DriftSpec::zero() { return affine(0.0, 0.0); }
DriftSpec DriftSpec::constant(double c) { return affine(c, 0.0); }
DriftSpec DriftSpec::affine(double c0, double c1) {
    return DriftSpec(std::make_shared<detail::AffineDrift>(c0, c1));
}
DriftSpec DriftSpec::damped_cubic(double lambda) {
    return DriftSpec(std::make_shared<detail::DampedCubicDrift>(lambda));
}
DriftSpec DriftSpec::logistic(double scale, double steepness, double midpoint) {
    return DriftSpec(std::make_shared<detail::LogisticDrift>(scale, steepness, midpoint));
}

namespace {

double rk4_step(const DriftSpec& a, double x, double h) {
    const double k1 = a.eval(x);
    const double k2 = a.eval(x + 0.5 * h * k1);
    const double k3 = a.eval(x + 0.5 * h * k2);
    const double k4 = a.eval(x + h * k3);
    return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Classical fixed-step order-4 integration over [t0, t1]; step bounded by
// ode_tol^{1/4}, step count forced even so Simpson applies exactly to the
// stored grid.
bool integrate_segment(const DriftSpec& a, double& x, double t0, double t1,
                       const SdeOptions& opts, SdePath::Segment& seg) {
    seg.t0 = t0;
    seg.t1 = t1;
    seg.states.clear();
    seg.states.push_back(x);
    const double len = t1 - t0;
    if (!(len > 0.0)) return true;
    const double h_target = std::clamp(0.5 * std::pow(opts.ode_tol, 0.25), 1e-5, 0.05);
    std::size_t steps = 2 * static_cast<std::size_t>(std::ceil(0.5 * len / h_target));
    if (steps < 2) steps = 2;
    const double h = len / static_cast<double>(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        x = rk4_step(a, x, h);
        seg.states.push_back(x);
        if (!(std::abs(x) <= opts.state_box)) return false;
    }
    return true;
}

} // namespace

SdePath simulate_with_jumps(const DriftSpec& drift, double x0,
                            std::span<const double> jump_times,
                            std::span<const double> jump_sizes, double t_end,
                            const SdeOptions& opts) {
    if (jump_times.size() != jump_sizes.size())
        throw std::invalid_argument("simulate: jump times and sizes must pair up");
    if (!(t_end > 0.0)) throw std::invalid_argument("simulate: need t_end > 0");
    SdePath path;
    path.jump_times.assign(jump_times.begin(), jump_times.end());
    path.jump_sizes.assign(jump_sizes.begin(), jump_sizes.end());

    double x = x0;
    double t = 0.0;
    for (std::size_t i = 0; i < path.jump_times.size(); ++i) {
        const double tj = path.jump_times[i];
        if (!(tj > t) || tj > t_end)
            throw std::invalid_argument("simulate: jump times must increase within (0, t_end]");
        SdePath::Segment seg;
        const bool ok = integrate_segment(drift, x, t, tj, opts, seg);
        path.segments.push_back(std::move(seg));
        if (!ok) {
            path.truncated = true;
            path.terminal = x;
            return path;
        }
        path.pre_jump_states.push_back(x);
        x += path.jump_sizes[i]; // jump applied exactly
        path.post_jump_states.push_back(x);
        t = tj;
    }
    SdePath::Segment tail;
    const bool ok = integrate_segment(drift, x, t, t_end, opts, tail);
    path.segments.push_back(std::move(tail));
    path.truncated = !ok;
    path.terminal = x;
    return path;
}

SdePath simulate(const DriftSpec& drift, double x0, double rate, const JumpLaw& sigma,
                 double t_end, const SdeOptions& opts, RngStream& stream) {
    const auto times =
        stochastic::sample_arrivals(stochastic::ArrivalProcess{rate}, t_end, stream);
    std::vector<double> sizes(times.size());
    for (auto& s : sizes) s = sigma.sample(stream);
    return simulate_with_jumps(drift, x0, times, sizes, t_end, opts);
}

namespace {

// Composite Simpson of f over one stored segment (uniform spacing, even step
// count by construction).
double simpson_over_segment(const DriftSpec& drift, const SdePath::Segment& seg) {
    const std::size_t n = seg.states.size() - 1;
    if (n == 0) return 0.0;
    const double h = (seg.t1 - seg.t0) / static_cast<double>(n);
    double acc = drift.derivative(seg.states.front()) +
                 drift.derivative(seg.states.back());
    for (std::size_t i = 1; i < n; ++i)
        acc += (i % 2 == 1 ? 4.0 : 2.0) * drift.derivative(seg.states[i]);
    return acc * h / 3.0;
}

} // namespace

double jump_time_derivative(const DriftSpec& drift, const SdePath& path, double t_end) {
    if (path.jump_times.empty() || !(path.jump_times.front() < t_end))
        throw std::domain_error("jump_time_derivative: path has no jump before t_end");
    if (path.truncated)
        throw std::domain_error("jump_time_derivative: path is truncated");
    const double prefactor =
        drift.eval(path.pre_jump_states.front()) - drift.eval(path.post_jump_states.front());
    // Segments after the first jump cover [T1, t_end] exactly.
    double integral = 0.0;
    for (std::size_t s = 1; s < path.segments.size(); ++s)
        integral += simpson_over_segment(drift, path.segments[s]);
    return prefactor * std::exp(integral);
}

std::vector<double> terminal_batch(const DriftSpec& drift, double x0, double rate,
                                   const JumpLaw& sigma, double t_end,
                                   const SdeOptions& opts, std::size_t n,
                                   std::uint64_t seed, int threads) {
    std::vector<double> out(n);
    parallel_for(n, threads, [&](std::size_t i) {
        RngStream s(seed, i);
        out[i] = simulate(drift, x0, rate, sigma, t_end, opts, s).terminal;
    });
    return out;
}

namespace reference {
std::vector<double> terminal_batch(const DriftSpec& drift, double x0, double rate,
                                   const JumpLaw& sigma, double t_end,
                                   const SdeOptions& opts, std::size_t n,
                                   std::uint64_t seed) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream s(seed, i);
        out[i] = simulate(drift, x0, rate, sigma, t_end, opts, s).terminal;
    }
    return out;
}
} // namespace reference

TvExperimentResult tv_convergence_experiment(
    const std::vector<DriftSpec>& drift_seq, const DriftSpec& drift,
    const std::vector<double>& x0_seq, double x0, double rate, const JumpLaw& sigma,
    double t, std::size_t n_per_law, const SdeOptions& opts, std::uint64_t seed,
    int threads) {
    if (drift_seq.size() != x0_seq.size())
        throw std::invalid_argument("tv experiment: drift and x0 sequences must pair up");
    TvExperimentResult result;
    result.monotone_at_limit = drift.monotone_near(x0);
    if (!result.monotone_at_limit)
        result.notes.push_back("limit drift not declared monotone near x0");

    // Paired streams: replicate i uses stream (seed, i) in every run, so the
    // estimate moves only with the parameters. The floor run uses fresh ids.
    const auto limit = terminal_batch(drift, x0, rate, sigma, t, opts, n_per_law,
                                      seed, threads);
    std::vector<double> floor_run(n_per_law);
    parallel_for(n_per_law, threads, [&](std::size_t i) {
        RngStream s(seed, n_per_law + i);
        floor_run[i] = simulate(drift, x0, rate, sigma, t, opts, s).terminal;
    });
    result.noise_floor = laws::tv_distance_paired(limit, floor_run);

    for (std::size_t j = 0; j < drift_seq.size(); ++j) {
        const auto run = terminal_batch(drift_seq[j], x0_seq[j], rate, sigma, t, opts,
                                        n_per_law, seed, threads);
        result.rows.push_back(
            {static_cast<int>(j), laws::tv_distance_paired(run, limit)});
    }

    int inversions = 0;
    double worst_excess = 0.0;
    for (std::size_t j = 1; j < result.rows.size(); ++j) {
        const double excess = result.rows[j].tv - result.rows[j - 1].tv;
        if (excess > 0.0) {
            ++inversions;
            worst_excess = std::max(worst_excess, excess);
        }
    }
    const bool decreasing = inversions <= 1 && worst_excess <= result.noise_floor;
    const bool settled =
        !result.rows.empty() && result.rows.back().tv <= 2.0 * result.noise_floor;
    result.pass = result.monotone_at_limit && decreasing && settled;
    if (!decreasing) result.notes.push_back("sequence not decreasing within the floor");
    if (!settled) result.notes.push_back("last value above twice the noise floor");
    return result;
}

} // namespace shotnoise::sde
