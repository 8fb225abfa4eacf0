#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "shotnoise/measures.hpp"
#include "shotnoise/rng.hpp"

using namespace shotnoise::measures;
using shotnoise::stochastic::RngStream;

namespace {

DiscreteSignedMeasure random_signed(RngStream& rng, int max_atoms) {
    const int n = 1 + static_cast<int>(rng.u01() * max_atoms);
    std::vector<DiscreteSignedMeasure::Atom> atoms;
    for (int i = 0; i < n; ++i)
        atoms.emplace_back(rng.uniform(-5.0, 5.0), rng.uniform(-1.0, 1.0));
    return DiscreteSignedMeasure(std::move(atoms));
}

DiscreteSignedMeasure random_law(RngStream& rng, int max_atoms, bool avoid_zero) {
    const int n = 1 + static_cast<int>(rng.u01() * max_atoms);
    std::vector<DiscreteSignedMeasure::Atom> atoms;
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
        double loc = rng.uniform(-5.0, 5.0);
        if (avoid_zero && std::abs(loc) < 1e-3) loc += 1.0;
        const double w = rng.u01();
        atoms.emplace_back(loc, w);
        mass += w;
    }
    for (auto& [loc, w] : atoms) w /= mass;
    return DiscreteSignedMeasure(std::move(atoms));
}

bool atoms_close(const DiscreteSignedMeasure& m, const oracle::AtomList& ref,
                 double tol = 1e-12) {
    if (m.size() != ref.size()) return false;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        if (std::abs(m.atoms()[i].first - ref[i].first) > 1e-9) return false;
        if (std::abs(m.atoms()[i].second - ref[i].second) > tol) return false;
    }
    return true;
}

} // namespace

TEST_CASE("tv norm on point examples") {
    CHECK(tv_norm(DiscreteSignedMeasure::dirac(0.0)) == 1.0);
    const auto d0 = DiscreteSignedMeasure::dirac(0.0);
    const auto d1 = DiscreteSignedMeasure::dirac(1.0);
    CHECK(tv_norm(d0 - d1) == 2.0);

    const DiscreteSignedMeasure a({{0.0, 0.3}, {1.0, 0.7}});
    const DiscreteSignedMeasure b({{0.0, 0.5}, {1.0, 0.5}});
    CHECK(tv_norm(a - b) == doctest::Approx(0.4).epsilon(1e-14));

    CHECK(tv_norm(DiscreteSignedMeasure{}) == 0.0);
}

TEST_CASE("normalization merges, dedups and preserves mass") {
    const DiscreteSignedMeasure m({{1.0, 0.5}, {1.0 + 5e-13, 0.25}, {2.0, -0.5}, {3.0, 0.0}});
    CHECK(m.size() == 2); // merged pair plus the negative atom; zero dropped
    CHECK(m.total_mass() == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(m.weight_at(1.0) == doctest::Approx(0.75));

    // Exact cancellation leaves an empty measure and zero tv.
    const auto z = m - m;
    CHECK(z.empty());
    CHECK(tv_norm(z) == 0.0);
}

TEST_CASE("convolution point examples") {
    const auto da = DiscreteSignedMeasure::dirac(2.5);
    const auto db = DiscreteSignedMeasure::dirac(-1.0);
    const auto c = convolve(da, db);
    REQUIRE(c.size() == 1);
    CHECK(c.atoms()[0].first == doctest::Approx(1.5));
    CHECK(c.atoms()[0].second == doctest::Approx(1.0));

    const DiscreteSignedMeasure coin({{0.0, 0.5}, {1.0, 0.5}});
    const auto sq = convolve(coin, coin);
    REQUIRE(sq.size() == 3);
    CHECK(sq.weight_at(0.0) == doctest::Approx(0.25));
    CHECK(sq.weight_at(1.0) == doctest::Approx(0.5));
    CHECK(sq.weight_at(2.0) == doctest::Approx(0.25));
}

TEST_CASE("convolution matches the brute-force double loop") {
    RngStream rng(2024, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const auto a = random_signed(rng, 20);
        const auto b = random_signed(rng, 20);
        oracle::AtomList la(a.atoms().begin(), a.atoms().end());
        oracle::AtomList lb(b.atoms().begin(), b.atoms().end());
        const auto mine = convolve(a, b);
        const auto ref = oracle::brute_convolve(la, lb);
        CHECK(atoms_close(mine, ref));
    }
}

TEST_CASE("convolution power: identity, diracs, binomial") {
    const auto m = DiscreteSignedMeasure({{0.5, 0.25}, {1.0, 0.75}});
    const auto p1 = convolution_power(m, 1);
    CHECK(p1.atoms() == m.atoms());

    const auto d5 = convolution_power(DiscreteSignedMeasure::dirac(0.0), 5);
    REQUIRE(d5.size() == 1);
    CHECK(d5.atoms()[0].first == 0.0);
    CHECK(d5.atoms()[0].second == doctest::Approx(1.0));

    // (1/2 d0 + 1/2 d1)^{*3}: binomial(3, 1/2) computed from first principles.
    const DiscreteSignedMeasure coin({{0.0, 0.5}, {1.0, 0.5}});
    const auto cube = convolution_power(coin, 3);
    REQUIRE(cube.size() == 4);
    double binom = 1.0; // C(3, k) ladder
    for (int k = 0; k <= 3; ++k) {
        CHECK(cube.weight_at(k) == doctest::Approx(binom / 8.0).epsilon(1e-13));
        binom = binom * (3 - k) / (k + 1);
    }

    CHECK_THROWS_AS(convolution_power(m, 0), std::invalid_argument);
}

TEST_CASE("convolve refuses to blow the support cap") {
    RngStream rng(7, 0);
    const auto a = random_signed(rng, 20);
    const auto b = random_signed(rng, 20);
    CHECK_THROWS_AS(convolve(a, b, 10), SizeLimitError);
}

TEST_CASE("product law point examples and oracle") {
    const auto p = product_law(DiscreteSignedMeasure::dirac(2.0),
                               DiscreteSignedMeasure::dirac(3.0));
    REQUIRE(p.size() == 1);
    CHECK(p.atoms()[0].first == doctest::Approx(6.0));

    const DiscreteSignedMeasure x({{1.0, 0.5}, {2.0, 0.5}});
    const auto degenerate = product_law(x, DiscreteSignedMeasure::dirac(0.0));
    REQUIRE(degenerate.size() == 1);
    CHECK(degenerate.atoms()[0].first == 0.0);
    CHECK(degenerate.atoms()[0].second == doctest::Approx(1.0));

    RngStream rng(99, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const auto a = random_law(rng, 10, false);
        const auto b = random_law(rng, 10, false);
        oracle::AtomList la(a.atoms().begin(), a.atoms().end());
        oracle::AtomList lb(b.atoms().begin(), b.atoms().end());
        CHECK(atoms_close(product_law(a, b), oracle::brute_product(la, lb)));
    }

    const DiscreteSignedMeasure signedm({{0.0, 1.5}, {1.0, -0.5}});
    CHECK_THROWS_AS(product_law(signedm, x), std::domain_error);
}

// Convolution-power contraction: ||mu^{*p} - nu^{*p}|| stays below
// p max(||mu||, ||nu||)^{p-1} ||mu - nu|| on every seeded instance.
TEST_CASE("convolution power tv inequality (seeded sweep)") {
    RngStream rng(31337, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const auto mu = random_signed(rng, 8);
        const auto nu = random_signed(rng, 8);
        const double dist = tv_norm(mu - nu);
        const double base = std::max(tv_norm(mu), tv_norm(nu));
        auto mp = mu;
        auto np = nu;
        for (unsigned p = 1; p <= 5; ++p) {
            if (p > 1) {
                mp = convolve(mp, mu);
                np = convolve(np, nu);
            }
            const double lhs = tv_norm(mp - np);
            const double rhs = p * std::pow(base, p - 1.0) * dist;
            CHECK(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
        }
    }
}

// Multiplying by an independent factor with no mass at zero cannot increase
// the tv distance between the laws.
TEST_CASE("independent product tv inequality (seeded sweep)") {
    RngStream rng(4242, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const auto x = random_law(rng, 10, false);
        const auto y = random_law(rng, 10, false);
        const auto z = random_law(rng, 10, true); // no atom at zero
        const double lhs = tv_norm(product_law(x, z) - product_law(y, z));
        const double rhs = tv_norm(x - y);
        CHECK(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
    }
}

TEST_CASE("convolution is commutative and associative up to merge tolerance") {
    RngStream rng(555, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const auto a = random_signed(rng, 6);
        const auto b = random_signed(rng, 6);
        const auto c = random_signed(rng, 6);
        CHECK(tv_norm(convolve(a, b) - convolve(b, a)) < 1e-10);
        CHECK(tv_norm(convolve(convolve(a, b), c) - convolve(a, convolve(b, c))) < 1e-9);
    }
}

TEST_CASE("csv round trip with required header") {
    const DiscreteSignedMeasure m({{-1.25, 0.5}, {0.0, -0.125}, {3.5, 0.625}});
    std::ostringstream out;
    write_csv(out, m);
    std::istringstream in(out.str());
    const auto back = read_csv(in);
    CHECK(back.atoms() == m.atoms());

    std::istringstream bad("loc,w\n1,2\n");
    CHECK_THROWS_AS(read_csv(bad), std::invalid_argument);
}
