#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace shotnoise::laws {

// Atom-aware empirical distribution: explicit mass at bit-exact zero plus a
// histogram of the nonzero part. Samplers guarantee that empty sums are
// exactly 0.0, so atom detection never thresholds; a cutoff would corrupt
// continuous laws with mass near 0.
//
// Bin contents are kept as integer counts so that mixture recombination and
// paired comparisons are exact.
struct EmpiricalLaw {
    std::size_t n = 0;
    std::size_t zero_count = 0;
    std::vector<double> edges;        // strictly increasing; B+1 entries
    std::vector<std::size_t> counts;  // B entries

    double atom_mass() const {
        return n == 0 ? 0.0 : static_cast<double>(zero_count) / static_cast<double>(n);
    }
    std::vector<double> bin_masses() const;
    std::size_t bins() const { return counts.size(); }
};

struct Binning {
    enum class Mode { automatic, explicit_edges } mode = Mode::automatic;
    std::vector<double> edges;

    static Binning automatic() { return {}; }
    static Binning with_edges(std::vector<double> e);
};

// Histogram of the nonzero part with Freedman-Diaconis width in automatic
// mode. Samples outside explicit edges fold into the end bins.
EmpiricalLaw estimate(std::span<const double> samples, const Binning& binning = {});

// Shared-range contract for comparisons: both laws rebuilt over the union
// range of their nonzero parts with the coarser of the two automatic widths.
std::pair<EmpiricalLaw, EmpiricalLaw> estimate_pair(std::span<const double> a,
                                                    std::span<const double> b);

// |atom_a - atom_b| + sum_b |mass_a(b) - mass_b(b)|, in [0, 2]. Requires
// identical bin edges; estimate_pair provides them.
double tv_distance(const EmpiricalLaw& a, const EmpiricalLaw& b);

// Convenience: estimate_pair + tv_distance.
double tv_distance_paired(std::span<const double> a, std::span<const double> b);

// Expected same-law reading of the histogram TV estimator at B bins and n
// samples per side: the resolution limit usable as a convergence floor. The
// constant is calibrated in the test suite.
double predicted_noise_floor(std::size_t bins, std::size_t n);

// One-sample Kolmogorov-Smirnov sup-distance against a reference CDF.
double ks_statistic(std::span<const double> samples,
                    const std::function<double(double)>& cdf);
double ks_statistic_two_sample(std::span<const double> a, std::span<const double> b);

// Critical values at level alpha (asymptotic).
double ks_threshold(std::size_t n, double alpha);
double ks_threshold_two_sample(std::size_t n, std::size_t m, double alpha);

// Per-count conditional laws plus mixing weights; all laws share the bin
// edges of the pooled sample so the mixture recombines exactly.
struct CountDecomposition {
    std::map<int, EmpiricalLaw> laws;
    std::map<int, double> weights;
    EmpiricalLaw pooled;
};
CountDecomposition decompose_by_count(std::span<const std::pair<double, int>> draws);

// JSON round trip (atom, edges, masses, n); stable key order.
std::string to_json(const EmpiricalLaw& law);
EmpiricalLaw law_from_json(const std::string& text);

} // namespace shotnoise::laws
