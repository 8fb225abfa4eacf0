#include "shotnoise/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace shotnoise::measures {

namespace {

// Sort by location and merge runs whose locations sit within kMergeTol of the
// run anchor; the anchor (first location of the run) is kept as the merged
// location. Zero-weight atoms are dropped afterwards, never before, so exact
// cancellations disappear from the support.
std::vector<DiscreteSignedMeasure::Atom>
normalize(std::vector<DiscreteSignedMeasure::Atom> atoms) {
    if (atoms.empty()) return atoms;
    if (!std::is_sorted(atoms.begin(), atoms.end(),
                        [](const auto& a, const auto& b) { return a.first < b.first; }))
        std::sort(atoms.begin(), atoms.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<DiscreteSignedMeasure::Atom> out;
    out.reserve(atoms.size());
    double anchor = atoms.front().first;
    double weight = atoms.front().second;
    for (std::size_t i = 1; i < atoms.size(); ++i) {
        if (atoms[i].first - anchor <= DiscreteSignedMeasure::kMergeTol) {
            weight += atoms[i].second;
        } else {
            if (weight != 0.0) out.emplace_back(anchor, weight);
            anchor = atoms[i].first;
            weight = atoms[i].second;
        }
    }
    if (weight != 0.0) out.emplace_back(anchor, weight);
    return out;
}

void require_finite(const std::vector<DiscreteSignedMeasure::Atom>& atoms) {
    for (const auto& [loc, w] : atoms) {
        if (!std::isfinite(loc) || !std::isfinite(w))
            throw std::invalid_argument("measure atoms must be finite");
    }
}

} // namespace

DiscreteSignedMeasure::DiscreteSignedMeasure(std::vector<Atom> atoms) {
    require_finite(atoms);
    atoms_ = normalize(std::move(atoms));
}

DiscreteSignedMeasure DiscreteSignedMeasure::dirac(double location, double weight) {
    return DiscreteSignedMeasure({{location, weight}});
}

double DiscreteSignedMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& [loc, w] : atoms_) s += w;
    return s;
}

double DiscreteSignedMeasure::weight_at(double location) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), location - kMergeTol,
                               [](const Atom& a, double v) { return a.first < v; });
    if (it != atoms_.end() && std::abs(it->first - location) <= kMergeTol)
        return it->second;
    return 0.0;
}

bool DiscreteSignedMeasure::is_probability(double tol) const {
    for (const auto& [loc, w] : atoms_)
        if (w < 0.0) return false;
    return std::abs(total_mass() - 1.0) <= tol;
}

DiscreteSignedMeasure DiscreteSignedMeasure::operator+(const DiscreteSignedMeasure& o) const {
    // Both operands are sorted, so a linear merge keeps normalization cheap.
    std::vector<Atom> merged;
    merged.reserve(atoms_.size() + o.atoms_.size());
    std::merge(atoms_.begin(), atoms_.end(), o.atoms_.begin(), o.atoms_.end(),
               std::back_inserter(merged),
               [](const Atom& a, const Atom& b) { return a.first < b.first; });
    return DiscreteSignedMeasure(std::move(merged));
}

DiscreteSignedMeasure DiscreteSignedMeasure::operator-(const DiscreteSignedMeasure& o) const {
    return *this + o.scaled(-1.0);
}

DiscreteSignedMeasure DiscreteSignedMeasure::scaled(double factor) const {
    std::vector<Atom> out = atoms_;
    for (auto& [loc, w] : out) w *= factor;
    return DiscreteSignedMeasure(std::move(out));
}

double tv_norm(const DiscreteSignedMeasure& m) {
    double s = 0.0;
    for (const auto& [loc, w] : m.atoms()) s += std::abs(w);
    return s;
}

DiscreteSignedMeasure convolve(const DiscreteSignedMeasure& a,
                               const DiscreteSignedMeasure& b,
                               std::size_t cap) {
    const std::size_t pairs = a.size() * b.size();
    if (!a.empty() && pairs / a.size() != b.size())
        throw SizeLimitError("convolve: support product overflows");
    if (pairs > cap) {
        throw SizeLimitError("convolve: support product " + std::to_string(pairs) +
                             " exceeds cap " + std::to_string(cap));
    }
    std::vector<DiscreteSignedMeasure::Atom> out;
    out.reserve(pairs);
    for (const auto& [xa, wa] : a.atoms())
        for (const auto& [xb, wb] : b.atoms())
            out.emplace_back(xa + xb, wa * wb);
    return DiscreteSignedMeasure(std::move(out));
}

DiscreteSignedMeasure convolution_power(const DiscreteSignedMeasure& m,
                                        unsigned p,
                                        std::size_t cap) {
    if (p == 0) throw std::invalid_argument("convolution_power: p must be >= 1");
    DiscreteSignedMeasure acc = m;
    for (unsigned i = 1; i < p; ++i) acc = convolve(acc, m, cap);
    return acc;
}

DiscreteSignedMeasure product_law(const DiscreteSignedMeasure& a,
                                  const DiscreteSignedMeasure& b,
                                  std::size_t cap) {
    if (!a.is_probability() || !b.is_probability())
        throw std::domain_error("product_law: inputs must be probability measures");
    const std::size_t pairs = a.size() * b.size();
    if (pairs > cap) throw SizeLimitError("product_law: support product exceeds cap");
    std::vector<DiscreteSignedMeasure::Atom> out;
    out.reserve(pairs);
    for (const auto& [xa, wa] : a.atoms())
        for (const auto& [xb, wb] : b.atoms())
            out.emplace_back(xa * xb, wa * wb);
    return DiscreteSignedMeasure(std::move(out));
}

void write_csv(std::ostream& out, const DiscreteSignedMeasure& m) {
    out << "location,weight\n";
    char buf[80];
    for (const auto& [loc, w] : m.atoms()) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", loc, w);
        out << buf;
    }
}

DiscreteSignedMeasure read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("measure csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "location,weight")
        throw std::invalid_argument("measure csv: expected header 'location,weight'");
    std::vector<DiscreteSignedMeasure::Atom> atoms;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("measure csv: malformed row '" + line + "'");
        atoms.emplace_back(std::stod(line.substr(0, comma)),
                           std::stod(line.substr(comma + 1)));
    }
    return DiscreteSignedMeasure(std::move(atoms));
}

} // namespace shotnoise::measures
