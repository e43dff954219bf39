#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "linf/distribution.hpp"
#include "test_util.hpp"

using namespace linf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("zipf basics") {
    CHECK_THROWS_AS(zipf(0, 1.1), std::invalid_argument);
    CHECK_THROWS_AS(zipf(5, 0.0), std::invalid_argument);

    const auto one = zipf(1, 1.1);
    REQUIRE(one.support_size() == 1);
    CHECK(one[0] == 1.0);

    const auto two = zipf(2, 1.0);
    CHECK_THAT(two[0], WithinRel(2.0 / 3.0, 1e-15));
    CHECK_THAT(two[1], WithinRel(1.0 / 3.0, 1e-15));

    // head mass of zipf(100, 1.1); reference from 50-digit summation
    const auto z = zipf(100, 1.1);
    CHECK_THAT(z[0], WithinRel(0.23375277805516433, 1e-12));
}

TEST_CASE("uniform basics") {
    CHECK_THROWS_AS(uniform(0), std::invalid_argument);
    CHECK(uniform(1)[0] == 1.0);
    const auto u4 = uniform(4);
    for (std::size_t i = 0; i < 4; ++i) CHECK_THAT(u4[i], WithinAbs(0.25, 1e-15));
    const auto u100 = uniform(100);
    CHECK_THAT(u100[42], WithinAbs(0.01, 1e-15));
}

TEST_CASE("distribution validation") {
    CHECK_THROWS_AS(Distribution({0.5, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(Distribution({-0.1, 1.1}), std::invalid_argument);
    CHECK_NOTHROW(Distribution({0.25, 0.75, 0.0}));  // zero mass entries count
    CHECK(Distribution({0.25, 0.75, 0.0}).support_size() == 3);
}

TEST_CASE("sampling determinism and degenerate cases") {
    const auto point = Distribution({1.0});
    const auto c = sample(point, 7, 123);
    REQUIRE(c.counts.size() == 1);
    CHECK(c.counts[0] == 7);

    const auto fair = Distribution({0.5, 0.5});
    const auto big = sample(fair, 1000000, 42);
    const double frac = static_cast<double>(big.counts[0]) / 1e6;
    CHECK(frac >= 0.497);  // 3-sigma band around 1/2 at n = 1e6
    CHECK(frac <= 0.503);

    const auto again = sample(fair, 1000000, 42);
    CHECK(big.counts == again.counts);
    const auto other = sample(fair, 1000000, 43);
    CHECK(big.counts != other.counts);

    CHECK_THROWS_AS(sample(fair, 0, 1), std::invalid_argument);
}

TEST_CASE("mle") {
    const auto a = mle(CountVector({3, 1}));
    CHECK(a.probs == std::vector<double>{0.75, 0.25});
    const auto b = mle(CountVector({0, 5}));
    CHECK(b.probs == std::vector<double>{0.0, 1.0});
    const auto c = mle(CountVector({2, 2, 2}));
    CHECK_THAT(c.probs[0], WithinRel(1.0 / 3.0, 1e-15));
    CHECK_THROWS_AS(CountVector({0, 0}), std::invalid_argument);
}

TEST_CASE("sup_dev") {
    const std::vector<double> p{0.7, 0.3};
    CHECK(sup_dev(std::span<const double>(p), std::span<const double>(p)) == 0.0);
    const std::vector<double> q{0.5, 0.5};
    CHECK_THAT(sup_dev(std::span<const double>(p), std::span<const double>(q)),
               WithinAbs(0.2, 1e-15));

    const std::vector<double> longer{0.4, 0.4, 0.2};
    const std::vector<double> shorter{0.5, 0.5};
    CHECK_THAT(sup_dev(std::span<const double>(shorter), std::span<const double>(longer)),
               WithinAbs(0.2, 1e-15));
}

TEST_CASE("sup_dev metric properties on random triples") {
    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
        const auto a = testutil::random_distribution(rng, 12).probs();
        const auto b = testutil::random_distribution(rng, 12).probs();
        const auto c = testutil::random_distribution(rng, 12).probs();
        auto d = [](const std::vector<double>& x, const std::vector<double>& y) {
            return sup_dev(std::span<const double>(x), std::span<const double>(y));
        };
        CHECK(d(a, b) == d(b, a));
        CHECK(d(a, a) == 0.0);
        CHECK(d(a, c) <= d(a, b) + d(b, c) + 1e-15);
        if (a != b) CHECK(d(a, b) > 0.0);
    }
}

TEST_CASE("v_star") {
    CHECK(v_star(std::span<const double>(std::vector<double>{1.0, 0.0})) == 0.0);
    CHECK_THAT(v_star(std::span<const double>(std::vector<double>{0.5, 0.5})),
               WithinAbs(0.25, 1e-15));

    // exhaustive scan oracle on zipf(100, 1.1): all masses < 1/2 so the
    // maximizer is the largest mass
    const auto z = zipf(100, 1.1);
    double scan = 0.0;
    for (double p : z.probs()) scan = std::max(scan, p * (1.0 - p));
    CHECK_THAT(v_star(z), WithinRel(scan, 1e-15));
    CHECK_THAT(v_star(z), WithinRel(z[0] * (1.0 - z[0]), 1e-15));
}

TEST_CASE("V_star definition cases") {
    CHECK(V_star(std::span<const double>(std::vector<double>{1.0})) == 0.0);
    CHECK_THAT(V_star(std::span<const double>(std::vector<double>{0.5, 0.5})),
               WithinRel(0.25 * std::log(3.0), 1e-15));
    // all variances equal for uniform, so the sup sits at the last index
    CHECK_THAT(V_star(uniform(8)), WithinRel((1.0 / 8.0) * (7.0 / 8.0) * std::log(9.0), 1e-14));

    // exhaustive scan oracle
    const auto z = zipf(30, 0.8);
    std::vector<double> sorted(z.probs());
    std::sort(sorted.rbegin(), sorted.rend());
    double scan = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        scan = std::max(scan, sorted[i] * (1.0 - sorted[i]) * std::log(static_cast<double>(i) + 2.0));
    }
    CHECK_THAT(V_star(z), WithinRel(scan, 1e-15));
}

TEST_CASE("phi") {
    CHECK(phi(1.0) == 0.0);
    CHECK(phi(0.0) == 0.0);
    CHECK_THAT(phi(1.0 / M_E), WithinRel(1.0 / M_E, 1e-15));
    CHECK_THROWS_AS(phi(-0.01), std::invalid_argument);
    CHECK_THROWS_AS(phi(1.01), std::invalid_argument);
}

TEST_CASE("structural inequalities on random distributions") {
    Rng rng(20240501);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t A = 2 + static_cast<std::size_t>(rng.next_u64() % 49);
        const auto d = testutil::random_distribution(rng, A);
        const double vs = v_star(d);
        const double Vs = V_star(d);
        CHECK(Vs <= phi(vs) + 1e-12);
        CHECK(Vs <= vs * std::log(static_cast<double>(A) + 1.0) + 1e-12);
    }
}

TEST_CASE("largest mass maximizes variance when all masses at most 1/2") {
    Rng rng(99);
    for (int t = 0; t < 200; ++t) {
        const auto d = testutil::random_distribution(rng, 8);
        if (d.top_mass() > 0.5) continue;
        const double top = d.top_mass();
        CHECK_THAT(v_star(d), WithinAbs(top * (1.0 - top), 1e-14));
    }
}

TEST_CASE("sample then mle concentrates") {
    const auto u = uniform(10);
    std::vector<double> devs;
    for (std::uint64_t t = 0; t < 200; ++t) {
        const auto counts = sample(u, 100000, stream_seed(5, t));
        devs.push_back(sup_dev(u, mle(counts)));
    }
    std::nth_element(devs.begin(), devs.begin() + 100, devs.end());
    CHECK(devs[100] < 0.01);
}
