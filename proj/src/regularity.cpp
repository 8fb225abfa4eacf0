#include "shotnoise/regularity.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "shotnoise/measures.hpp"
#include "shotnoise/parallel.hpp"

namespace shotnoise::regularity {

using kernels::Kernel;
using kernels::TimeFunction;
using stochastic::JumpLaw;
using stochastic::RngStream;

std::string RegularityReport::to_json() const {
    nlohmann::json j;
    j["condition"] = condition;
    switch (verdict) {
        case Verdict::pass: j["verdict"] = "pass"; break;
        case Verdict::fail: j["verdict"] = "fail"; break;
        case Verdict::inconclusive: j["verdict"] = "inconclusive"; break;
    }
    j["measured"] = measured;
    j["sample_size"] = sample_size;
    j["tolerance"] = tolerance;
    j["notes"] = notes;
    return j.dump(2);
}

std::vector<double> pushforward_samples(const Kernel& k, double t, const JumpLaw& sigma,
                                        std::size_t n, RngStream& stream) {
    if (!(t > 0.0)) throw std::invalid_argument("pushforward: need t > 0");
    if (n == 0) throw std::invalid_argument("pushforward: need n >= 1");
    std::vector<double> out(n);
    for (auto& v : out) {
        const double u = stream.uniform(0.0, t);
        v = k.eval(u, sigma.sample(stream));
    }
    return out;
}

std::vector<double> pushforward_samples_batch(const Kernel& k, double t,
                                              const JumpLaw& sigma, std::size_t n,
                                              std::uint64_t seed, int threads) {
    std::vector<double> out(n);
    parallel_for(n, threads, [&](std::size_t i) {
        RngStream s(seed, i);
        const double u = s.uniform(0.0, t);
        out[i] = k.eval(u, sigma.sample(s));
    });
    return out;
}

namespace {

RegularityReport small_derivative_fraction(const char* condition, const Kernel& k,
                                           TimeRange range, const JumpLaw& sigma,
                                           std::size_t n, double eps,
                                           double fail_fraction, RngStream& stream,
                                           bool space) {
    RegularityReport rep;
    rep.condition = condition;
    rep.sample_size = n;
    rep.tolerance = fail_fraction;
    if (space && !sigma.has_density()) {
        rep.verdict = RegularityReport::Verdict::inconclusive;
        rep.notes.push_back("jump law exposes no density; hypothesis not checkable");
        return rep;
    }
    if ((space && !k.has_space_derivative()) || (!space && !k.has_time_derivative())) {
        rep.verdict = RegularityReport::Verdict::inconclusive;
        rep.notes.push_back("kernel family declares no such derivative");
        return rep;
    }
    std::size_t small = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = stream.uniform(range.lo, range.hi);
        const double x = sigma.sample(stream);
        if (space) {
            const double d = k.space_derivative(t, x);
            if (d * d <= eps) ++small;
        } else {
            if (std::abs(k.time_derivative(t, x)) <= eps) ++small;
        }
    }
    const double fraction = static_cast<double>(small) / static_cast<double>(n);
    rep.measured["small_fraction"] = fraction;
    rep.measured["eps"] = eps;
    rep.verdict = fraction < fail_fraction ? RegularityReport::Verdict::pass
                                           : RegularityReport::Verdict::fail;
    return rep;
}

} // namespace

RegularityReport check_time_derivative(const Kernel& k, TimeRange t_range,
                                       const JumpLaw& sigma, std::size_t n, double eps,
                                       double fail_fraction, RngStream& stream) {
    return small_derivative_fraction("time-derivative-nonvanishing", k, t_range, sigma,
                                     n, eps, fail_fraction, stream, false);
}

RegularityReport check_space_jacobian(const Kernel& k, TimeRange t_range,
                                      const JumpLaw& sigma, std::size_t n, double eps,
                                      double fail_fraction, RngStream& stream) {
    return small_derivative_fraction("space-jacobian-nonvanishing", k, t_range, sigma,
                                     n, eps, fail_fraction, stream, true);
}

RegularityReport check_sequence_derivatives(const std::vector<TimeFunction>& seq,
                                            const TimeFunction& limit, double a,
                                            double b, std::size_t n_grid, double tol,
                                            double eps,
                                            double zero_measure_threshold) {
    if (seq.empty()) throw std::invalid_argument("sequence check: empty sequence");
    if (!(b > a)) throw std::invalid_argument("sequence check: need b > a");
    if (n_grid < 8) n_grid = 8;

    RegularityReport rep;
    rep.condition = "profile-sequence-convergence";
    rep.sample_size = n_grid;
    rep.tolerance = tol;

    const double hstep = (b - a) / static_cast<double>(n_grid);
    const auto trapezoid_abs_gap = [&](const TimeFunction& gn) {
        double acc = 0.0;
        for (std::size_t i = 0; i <= n_grid; ++i) {
            const double t = a + hstep * static_cast<double>(i);
            const double v = std::abs(gn.derivative(t) - limit.derivative(t));
            acc += (i == 0 || i == n_grid) ? 0.5 * v : v;
        }
        return acc * hstep;
    };

    std::vector<double> endpoint_gaps, deriv_gaps;
    for (const auto& gn : seq) {
        endpoint_gaps.push_back(std::abs(gn.eval(a) - limit.eval(a)));
        deriv_gaps.push_back(trapezoid_abs_gap(gn));
    }
    std::size_t small = 0;
    for (std::size_t i = 0; i <= n_grid; ++i) {
        const double t = a + hstep * static_cast<double>(i);
        if (std::abs(limit.derivative(t)) <= eps) ++small;
    }
    const double zero_measure =
        (b - a) * static_cast<double>(small) / static_cast<double>(n_grid + 1);

    for (std::size_t i = 0; i < seq.size(); ++i) {
        rep.measured["endpoint_gap_" + std::to_string(i)] = endpoint_gaps[i];
        rep.measured["deriv_l1_gap_" + std::to_string(i)] = deriv_gaps[i];
    }
    rep.measured["zero_derivative_measure"] = zero_measure;

    bool decreasing = true;
    for (std::size_t i = 1; i < seq.size(); ++i)
        decreasing &= endpoint_gaps[i] <= endpoint_gaps[i - 1] + tol &&
                      deriv_gaps[i] <= deriv_gaps[i - 1] + tol;
    const bool converged = endpoint_gaps.back() <= tol && deriv_gaps.back() <= tol;
    const bool nonvanishing = zero_measure < zero_measure_threshold;

    if (!nonvanishing) {
        rep.verdict = RegularityReport::Verdict::fail;
        rep.notes.push_back("limit derivative vanishes on a non-null set");
    } else if (decreasing && converged) {
        rep.verdict = RegularityReport::Verdict::pass;
    } else {
        rep.verdict = RegularityReport::Verdict::fail;
        rep.notes.push_back("discrepancies do not settle below tolerance");
    }
    return rep;
}

RegularityReport convolution_power_diagnostic(std::span<const double> samples,
                                              unsigned p, std::size_t grid_bins) {
    if (samples.empty())
        throw std::invalid_argument("convolution diagnostic: no samples");
    if (p == 0) throw std::invalid_argument("convolution diagnostic: need p >= 1");
    if (grid_bins < 2) grid_bins = 64;

    RegularityReport rep;
    rep.condition = "convolution-power-concentration";
    rep.sample_size = samples.size();
    rep.notes.push_back("diagnostic only: indicative of smoothness, not decisive");

    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    double lo = *mn, hi = *mx;
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / static_cast<double>(grid_bins);
    std::vector<double> mass(grid_bins, 0.0);
    for (double v : samples) {
        std::size_t b = static_cast<std::size_t>((v - lo) / width);
        if (b >= grid_bins) b = grid_bins - 1;
        mass[b] += 1.0 / static_cast<double>(samples.size());
    }
    std::vector<measures::DiscreteSignedMeasure::Atom> atoms;
    for (std::size_t b = 0; b < grid_bins; ++b)
        if (mass[b] > 0.0)
            atoms.emplace_back(lo + (static_cast<double>(b) + 0.5) * width, mass[b]);
    const auto base = measures::DiscreteSignedMeasure(std::move(atoms));
    const auto powered = measures::convolution_power(base, p);

    double max_mass = 0.0;
    double occupied = 0.0;
    for (const auto& [loc, w] : powered.atoms()) {
        max_mass = std::max(max_mass, w);
        occupied += 1.0;
    }
    // Uniform reference level over the occupied support of the power.
    const double uniform_level = occupied > 0.0 ? 1.0 / occupied : 1.0;
    double heavy_fraction = 0.0;
    for (const auto& [loc, w] : powered.atoms())
        if (w > 8.0 * uniform_level) heavy_fraction += w;

    rep.measured["p"] = p;
    rep.measured["grid_bins"] = static_cast<double>(grid_bins);
    rep.measured["max_bin_mass"] = max_mass;
    rep.measured["support_bins"] = occupied;
    rep.measured["heavy_mass_fraction"] = heavy_fraction;
    rep.measured["concentration_flag"] = max_mass > 0.5 ? 1.0 : 0.0;
    rep.verdict = RegularityReport::Verdict::inconclusive;
    return rep;
}

} // namespace shotnoise::regularity
