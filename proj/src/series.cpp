#include "shotnoise/series.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "shotnoise/arrivals.hpp"
#include "shotnoise/parallel.hpp"

namespace shotnoise::series {

using kernels::ConditionReport;
using kernels::IntegrationOptions;
using stochastic::ArrivalProcess;
using stochastic::RngStream;

namespace {

// Smallest horizon from the doubling ladder whose integral tail is below eps.
// Uses the |h| tail when it is finite (it bounds the mean of the dropped
// terms); otherwise the saturated square tail that controls existence.
double resolve_horizon(const SeriesConfig& cfg, double eps,
                       const IntegrationOptions& opts, double* tail_out) {
    IntegrationOptions tail_opts = opts;
    tail_opts.tol = std::max(eps * 0.1, 1e-12);
    double t = 1.0;
    for (int i = 0; i < 60; ++i) {
        const ConditionReport l1tail =
            kernels::l1_norm_from(cfg.kernel, cfg.sigma, cfg.rate, t, tail_opts);
        if (!l1tail.divergent && l1tail.converged && l1tail.value < eps) {
            *tail_out = l1tail.value;
            return t;
        }
        t *= 2.0;
    }
    throw RefusedError("series: could not resolve a truncation horizon with tail < epsilon");
}

} // namespace

ValidatedSeries validate(const SeriesConfig& cfg, const IntegrationOptions& opts) {
    ValidatedSeries v{cfg, 0.0, 0.0, 0.0, {}};
    v.existence = kernels::l2_condition(cfg.kernel, cfg.sigma, cfg.rate, opts);
    if (v.existence.divergent)
        throw RefusedError("series: existence integral diverges; refusing to sample");

    if (cfg.truncation.t_max) {
        v.t_max = *cfg.truncation.t_max;
        IntegrationOptions tail_opts = opts;
        tail_opts.tol = std::max(cfg.truncation.epsilon * 0.1, 1e-12);
        const ConditionReport tail =
            kernels::l1_norm_from(cfg.kernel, cfg.sigma, cfg.rate, v.t_max, tail_opts);
        if (tail.divergent || !tail.converged || tail.value >= cfg.truncation.epsilon)
            throw RefusedError("series: requested t_max leaves an integral tail >= epsilon");
        v.tail_error = tail.value;
    } else {
        v.t_max = resolve_horizon(cfg, cfg.truncation.epsilon, opts, &v.tail_error);
    }

    if (cfg.centering == CenteringMode::tail_compensated) {
        // Mean of the dropped tail, restricted to |h| <= 1 summands.
        const auto profile_tol = std::max(cfg.truncation.epsilon * 0.1, 1e-10);
        const ConditionReport full = kernels::centering_constant(
            cfg.kernel, cfg.sigma, cfg.rate, profile_tol);
        if (!full.converged)
            throw RefusedError("series: tail compensation requested but the centering "
                               "constant did not converge");
        kernels::CenteringSchedule upto;
        upto.s0 = v.t_max;
        upto.max_steps = 1;
        IntegrationOptions o = opts;
        const ConditionReport head = kernels::centering_constant(
            cfg.kernel, cfg.sigma, cfg.rate, profile_tol, upto, o);
        v.compensation = full.value - head.value;
    }
    return v;
}

double sample_full(const ValidatedSeries& v, RngStream& stream) {
    const auto arrivals =
        stochastic::sample_arrivals(ArrivalProcess{v.cfg.rate}, v.t_max, stream);
    if (arrivals.empty()) return 0.0 + v.compensation;
    double acc = 0.0;
    for (double t : arrivals) acc += v.cfg.kernel.eval(t, v.cfg.sigma.sample(stream));
    return acc + v.compensation;
}

TruncatedDraw sample_truncated(const kernels::Kernel& f, double t,
                               const stochastic::JumpLaw& sigma, double rate,
                               RngStream& stream) {
    const auto arrivals = stochastic::sample_arrivals(ArrivalProcess{rate}, t, stream);
    TruncatedDraw d;
    d.count = static_cast<int>(arrivals.size());
    if (arrivals.empty()) return d; // empty sum stays bit-exact 0.0
    double acc = 0.0;
    for (double ti : arrivals) acc += f.eval(ti, sigma.sample(stream));
    d.value = acc;
    return d;
}

double sample_conditional_first_p(const SeriesConfig& cfg, int p, double t_next,
                                  RngStream& stream) {
    const auto times = stochastic::sample_conditional_order_stats(p, t_next, stream);
    double acc = 0.0;
    for (double ti : times) acc += cfg.kernel.eval(ti, cfg.sigma.sample(stream));
    return acc;
}

std::vector<double> sample_full_batch(const ValidatedSeries& v, std::size_t n,
                                      std::uint64_t seed, int threads) {
    std::vector<double> out(n);
    parallel_for(n, threads, [&](std::size_t i) {
        RngStream s(seed, i);
        out[i] = sample_full(v, s);
    });
    return out;
}

std::vector<TruncatedDraw> sample_truncated_batch(const kernels::Kernel& f, double t,
                                                  const stochastic::JumpLaw& sigma,
                                                  double rate, std::size_t n,
                                                  std::uint64_t seed, int threads) {
    std::vector<TruncatedDraw> out(n);
    parallel_for(n, threads, [&](std::size_t i) {
        RngStream s(seed, i);
        out[i] = sample_truncated(f, t, sigma, rate, s);
    });
    return out;
}

std::vector<double> sample_conditional_batch(const SeriesConfig& cfg, int p,
                                             double t_next, std::size_t n,
                                             std::uint64_t seed, int threads) {
    std::vector<double> out(n);
    parallel_for(n, threads, [&](std::size_t i) {
        RngStream s(seed, i);
        out[i] = sample_conditional_first_p(cfg, p, t_next, s);
    });
    return out;
}

namespace reference {

std::vector<double> sample_full_batch(const ValidatedSeries& v, std::size_t n,
                                      std::uint64_t seed) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream s(seed, i);
        out[i] = sample_full(v, s);
    }
    return out;
}

std::vector<TruncatedDraw> sample_truncated_batch(const kernels::Kernel& f, double t,
                                                  const stochastic::JumpLaw& sigma,
                                                  double rate, std::size_t n,
                                                  std::uint64_t seed) {
    std::vector<TruncatedDraw> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream s(seed, i);
        out[i] = sample_truncated(f, t, sigma, rate, s);
    }
    return out;
}

} // namespace reference

void write_values_csv(std::ostream& out, const std::vector<double>& values) {
    out << "id,value\n";
    char buf[64];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, values[i]);
        out << buf;
    }
}

void write_truncated_csv(std::ostream& out, const std::vector<TruncatedDraw>& draws) {
    out << "id,value,count\n";
    char buf[80];
    for (std::size_t i = 0; i < draws.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%d\n", i, draws[i].value,
                      draws[i].count);
        out << buf;
    }
}

void write_conditional_csv(std::ostream& out, const std::vector<double>& values,
                           double t_next) {
    out << "id,value,t_next\n";
    char buf[96];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i, values[i], t_next);
        out << buf;
    }
}

} // namespace shotnoise::series
