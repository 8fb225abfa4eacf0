#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <utility>
#include <vector>

namespace shotnoise::measures {

struct SizeLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Finite-support signed measure with exact weight arithmetic. Locations are
// kept strictly sorted; locations closer than kMergeTol are merged so that
// floating-point sums of distinct rationals cannot blow up the support.
// Instances are immutable after construction and safe to share.
//
// Total-variation convention: tv_norm is the plain sum of |weight|, so the
// distance between two probability measures lies in [0, 2] (no 1/2 factor).
class DiscreteSignedMeasure {
public:
    static constexpr double kMergeTol = 1e-12;

    using Atom = std::pair<double, double>; // (location, weight)

    DiscreteSignedMeasure() = default;
    explicit DiscreteSignedMeasure(std::vector<Atom> atoms);

    static DiscreteSignedMeasure dirac(double location, double weight = 1.0);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    double total_mass() const;
    double weight_at(double location) const;

    // Nonnegative weights and total mass 1 (within tol).
    bool is_probability(double tol = 1e-9) const;

    DiscreteSignedMeasure operator+(const DiscreteSignedMeasure& o) const;
    DiscreteSignedMeasure operator-(const DiscreteSignedMeasure& o) const;
    DiscreteSignedMeasure scaled(double factor) const;

private:
    std::vector<Atom> atoms_;
};

// Sum of absolute weights; 0 for the empty measure.
double tv_norm(const DiscreteSignedMeasure& m);

inline constexpr std::size_t kDefaultConvolveCap = 10'000'000;

// Pairwise-sum convolution. Throws SizeLimitError when the product of support
// sizes exceeds cap; exactness matters more than a silently truncated result.
DiscreteSignedMeasure convolve(const DiscreteSignedMeasure& a,
                               const DiscreteSignedMeasure& b,
                               std::size_t cap = kDefaultConvolveCap);

// p-fold convolution power by repeated convolve; p = 1 returns m unchanged.
DiscreteSignedMeasure convolution_power(const DiscreteSignedMeasure& m,
                                        unsigned p,
                                        std::size_t cap = kDefaultConvolveCap);

// Law of X*Z for independent X ~ a, Z ~ b. Both inputs must be probability
// measures; signed input throws std::domain_error.
DiscreteSignedMeasure product_law(const DiscreteSignedMeasure& a,
                                  const DiscreteSignedMeasure& b,
                                  std::size_t cap = kDefaultConvolveCap);

// CSV with required header "location,weight".
void write_csv(std::ostream& out, const DiscreteSignedMeasure& m);
DiscreteSignedMeasure read_csv(std::istream& in);

} // namespace shotnoise::measures
