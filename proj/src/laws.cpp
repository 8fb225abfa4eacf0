#include "shotnoise/laws.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace shotnoise::laws {

namespace {

constexpr std::size_t kMaxBins = 8192;

struct NonzeroSummary {
    std::vector<double> values; // sorted
    double lo = 0.0, hi = 0.0, iqr = 0.0;
};

NonzeroSummary nonzero_summary(std::span<const double> samples) {
    NonzeroSummary s;
    s.values.reserve(samples.size());
    for (double v : samples)
        if (v != 0.0) s.values.push_back(v);
    if (s.values.empty()) return s;
    std::sort(s.values.begin(), s.values.end());
    s.lo = s.values.front();
    s.hi = s.values.back();
    const auto q = [&](double p) {
        const double idx = p * static_cast<double>(s.values.size() - 1);
        const std::size_t i = static_cast<std::size_t>(idx);
        const double frac = idx - static_cast<double>(i);
        if (i + 1 >= s.values.size()) return s.values.back();
        return s.values[i] * (1.0 - frac) + s.values[i + 1] * frac;
    };
    s.iqr = q(0.75) - q(0.25);
    return s;
}

// Freedman-Diaconis width with fallbacks for degenerate spreads.
double auto_width(const NonzeroSummary& s) {
    const double m = static_cast<double>(s.values.size());
    double w = 2.0 * s.iqr / std::cbrt(m);
    if (w <= 0.0) {
        double mean = 0.0;
        for (double v : s.values) mean += v;
        mean /= m;
        double var = 0.0;
        for (double v : s.values) var += (v - mean) * (v - mean);
        w = 3.49 * std::sqrt(var / m) / std::cbrt(m);
    }
    return w;
}

std::vector<double> build_edges(double lo, double hi, double width) {
    if (!(hi > lo)) {
        const double pad = std::max(1e-9 * std::abs(lo), 1e-12);
        return {lo - pad, lo + pad};
    }
    std::size_t bins = kMaxBins;
    if (width > 0.0) {
        const double b = std::ceil((hi - lo) / width);
        if (b < static_cast<double>(kMaxBins)) bins = std::max<std::size_t>(1, static_cast<std::size_t>(b));
    }
    std::vector<double> edges(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    edges.front() = lo;
    edges.back() = hi;
    return edges;
}

EmpiricalLaw fill(std::span<const double> samples, std::vector<double> edges) {
    EmpiricalLaw law;
    law.n = samples.size();
    law.edges = std::move(edges);
    law.counts.assign(law.edges.size() - 1, 0);
    const double lo = law.edges.front();
    const double hi = law.edges.back();
    const std::size_t B = law.counts.size();
    for (double v : samples) {
        if (v == 0.0) {
            ++law.zero_count;
            continue;
        }
        std::size_t b;
        if (v <= lo) {
            b = 0;
        } else if (v >= hi) {
            b = B - 1;
        } else {
            b = static_cast<std::size_t>(
                std::upper_bound(law.edges.begin(), law.edges.end(), v) -
                law.edges.begin()) - 1;
            if (b >= B) b = B - 1;
        }
        ++law.counts[b];
    }
    return law;
}

} // namespace

std::vector<double> EmpiricalLaw::bin_masses() const {
    std::vector<double> m(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        m[i] = n == 0 ? 0.0 : static_cast<double>(counts[i]) / static_cast<double>(n);
    return m;
}

Binning Binning::with_edges(std::vector<double> e) {
    if (e.size() < 2) throw std::invalid_argument("binning: need at least two edges");
    for (std::size_t i = 1; i < e.size(); ++i)
        if (!(e[i] > e[i - 1]))
            throw std::invalid_argument("binning: edges must strictly increase");
    Binning b;
    b.mode = Mode::explicit_edges;
    b.edges = std::move(e);
    return b;
}

EmpiricalLaw estimate(std::span<const double> samples, const Binning& binning) {
    if (samples.empty()) throw std::invalid_argument("estimate: no samples");
    if (binning.mode == Binning::Mode::explicit_edges)
        return fill(samples, binning.edges);
    const NonzeroSummary s = nonzero_summary(samples);
    if (s.values.empty()) {
        // Pure atom at zero is a valid law: no bins at all.
        EmpiricalLaw law;
        law.n = samples.size();
        law.zero_count = samples.size();
        return law;
    }
    return fill(samples, build_edges(s.lo, s.hi, auto_width(s)));
}

std::pair<EmpiricalLaw, EmpiricalLaw> estimate_pair(std::span<const double> a,
                                                    std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("estimate_pair: no samples");
    const NonzeroSummary sa = nonzero_summary(a);
    const NonzeroSummary sb = nonzero_summary(b);
    if (sa.values.empty() && sb.values.empty())
        return {estimate(a), estimate(b)};
    double lo, hi, width;
    if (sa.values.empty() || sb.values.empty()) {
        const NonzeroSummary& s = sa.values.empty() ? sb : sa;
        lo = s.lo, hi = s.hi, width = auto_width(s);
    } else {
        lo = std::min(sa.lo, sb.lo);
        hi = std::max(sa.hi, sb.hi);
        width = std::max(auto_width(sa), auto_width(sb)); // coarser of the two
    }
    auto edges = build_edges(lo, hi, width);
    return {fill(a, edges), fill(b, edges)};
}

double tv_distance(const EmpiricalLaw& a, const EmpiricalLaw& b) {
    if (a.edges != b.edges)
        throw std::invalid_argument("tv_distance: laws built on different bin edges");
    double tv = std::abs(a.atom_mass() - b.atom_mass());
    const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n);
    for (std::size_t i = 0; i < a.counts.size(); ++i)
        tv += std::abs(static_cast<double>(a.counts[i]) / na -
                       static_cast<double>(b.counts[i]) / nb);
    return tv;
}

double tv_distance_paired(std::span<const double> a, std::span<const double> b) {
    const auto [la, lb] = estimate_pair(a, b);
    return tv_distance(la, lb);
}

double predicted_noise_floor(std::size_t bins, std::size_t n) {
    // Mean |difference| of two binomial proportions, summed over bins with
    // p ~ 1/B each: sqrt(2/pi) * sum sqrt(2 p (1-p) / n) ~ 0.8 sqrt(2 B / n).
    return 0.8 * std::sqrt(2.0 * static_cast<double>(bins) / static_cast<double>(n));
}

double ks_statistic(std::span<const double> samples,
                    const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double F = cdf(x[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - F));
        d = std::max(d, std::abs(F - static_cast<double>(i) / n));
    }
    return d;
}

double ks_statistic_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_statistic_two_sample: no samples");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v) ++i;
        while (j < y.size() && y[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx -
                                 static_cast<double>(j) / ny));
    }
    return d;
}

double ks_threshold(std::size_t n, double alpha) {
    return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(static_cast<double>(n));
}

double ks_threshold_two_sample(std::size_t n, std::size_t m, double alpha) {
    const double nn = static_cast<double>(n), mm = static_cast<double>(m);
    return std::sqrt(-0.5 * std::log(0.5 * alpha)) * std::sqrt((nn + mm) / (nn * mm));
}

CountDecomposition decompose_by_count(std::span<const std::pair<double, int>> draws) {
    if (draws.empty()) throw std::invalid_argument("decompose_by_count: no draws");
    std::vector<double> pooled;
    pooled.reserve(draws.size());
    for (const auto& [v, c] : draws) pooled.push_back(v);

    CountDecomposition out;
    out.pooled = estimate(pooled);
    const Binning shared = out.pooled.bins() == 0
                               ? Binning::automatic()
                               : Binning::with_edges(out.pooled.edges);

    std::map<int, std::vector<double>> groups;
    for (const auto& [v, c] : draws) groups[c].push_back(v);
    for (auto& [c, values] : groups) {
        out.laws.emplace(c, estimate(values, shared));
        out.weights[c] =
            static_cast<double>(values.size()) / static_cast<double>(draws.size());
    }
    return out;
}

std::string to_json(const EmpiricalLaw& law) {
    nlohmann::json j;
    j["n"] = law.n;
    j["atom"] = law.atom_mass();
    j["edges"] = law.edges;
    j["masses"] = law.bin_masses();
    return j.dump(2);
}

EmpiricalLaw law_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    EmpiricalLaw law;
    law.n = j.at("n").get<std::size_t>();
    law.edges = j.at("edges").get<std::vector<double>>();
    const auto masses = j.at("masses").get<std::vector<double>>();
    const double atom = j.at("atom").get<double>();
    law.zero_count = static_cast<std::size_t>(
        std::llround(atom * static_cast<double>(law.n)));
    law.counts.resize(masses.size());
    for (std::size_t i = 0; i < masses.size(); ++i)
        law.counts[i] = static_cast<std::size_t>(
            std::llround(masses[i] * static_cast<double>(law.n)));
    return law;
}

} // namespace shotnoise::laws
