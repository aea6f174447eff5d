#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "cegof/special_functions.hpp"

using namespace cegof;

namespace {

// Independent oracle for the standard normal CDF: Taylor series of erf,
// accurate to ~1e-14 for |x| <= 3.
double erf_series(double x) {
    double term = x;
    double sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= -x * x / n;
        double contrib = term / (2 * n + 1);
        sum += contrib;
        if (std::abs(contrib) < 1e-18) break;
    }
    return sum * 2.0 / std::sqrt(pi);
}

double phi_series(double x) { return 0.5 * (1.0 + erf_series(x / std::sqrt(2.0))); }

// Bisection of the series CDF.
double quantile_oracle(double p) {
    double lo = -6.0, hi = 6.0;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        (phi_series(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("inv_norm_cdf matches the series-bisection oracle") {
    CHECK(inv_norm_cdf(0.5) == Catch::Approx(0.0).margin(1e-12));
    CHECK(inv_norm_cdf(0.975) == Catch::Approx(quantile_oracle(0.975)).margin(1e-9));
    CHECK(inv_norm_cdf(0.975) == Catch::Approx(1.959964).margin(1e-6));
    CHECK(inv_norm_cdf(0.841344746) == Catch::Approx(1.0).margin(1e-6));
    CHECK(inv_norm_cdf(phi_series(1.0)) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("inv_norm_cdf round-trips through the normal CDF") {
    std::vector<double> grid;
    for (double p = 1e-6; p < 1.0; p += 0.0137) grid.push_back(p);
    grid.push_back(1.0 - 1e-6);
    double prev = -1e300;
    for (double p : grid) {
        double x = inv_norm_cdf(p);
        CHECK(std::abs(norm_cdf(x) - p) <= 1e-9);
        CHECK(x >= prev);
        prev = x;
    }
}

TEST_CASE("inv_norm_cdf rejects out-of-range probabilities") {
    CHECK_THROWS_AS(inv_norm_cdf(0.0), input_error);
    CHECK_THROWS_AS(inv_norm_cdf(1.0), input_error);
    CHECK_THROWS_AS(inv_norm_cdf(-0.2), input_error);
}

TEST_CASE("digamma known values and recurrence") {
    CHECK(digamma(1.0) == Catch::Approx(-0.57721566490153286).margin(1e-10));
    CHECK(digamma(2.0) == Catch::Approx(-0.57721566490153286 + 1.0).margin(1e-10));
    for (double x = 0.5; x <= 20.0; x += 0.5) {
        CHECK(digamma(x + 1.0) - digamma(x) == Catch::Approx(1.0 / x).margin(1e-12));
    }
    CHECK_THROWS_AS(digamma(0.0), input_error);
    CHECK_THROWS_AS(digamma(-3.0), input_error);
}

TEST_CASE("RngStream is deterministic and streams do not collide") {
    RngStream a(123, 7), b(123, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream c(123, 8);
    bool any_equal = false;
    RngStream a2(123, 7);
    for (int i = 0; i < 16; ++i) any_equal |= (a2.next_u64() == c.next_u64());
    CHECK_FALSE(any_equal);

    RngStream s1 = RngStream(99).split(5);
    RngStream s2 = RngStream(99).split(5);
    CHECK(s1.next_u64() == s2.next_u64());
}

TEST_CASE("RngStream uniform draws stay strictly inside (0,1)") {
    RngStream rng(7);
    for (int i = 0; i < 100000; ++i) {
        double u = rng.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("positive stable sampler") {
    RngStream rng(2024);
    SECTION("degenerate at index 1") {
        CHECK(sample_positive_stable(1.0, rng) == 1.0);
    }
    SECTION("draws are positive and finite") {
        for (int i = 0; i < 10000; ++i) {
            double s = sample_positive_stable(0.7, rng);
            CHECK(s > 0.0);
            CHECK(std::isfinite(s));
        }
    }
    SECTION("index 1/2 matches the Levy law median") {
        // Closed-form CDF of the Levy(1/2) law: F(x) = erfc(1/(2 sqrt(x))).
        // Median solves erfc(z) = 1/2, i.e. z = -quantile(0.25)/sqrt(2).
        double z = -inv_norm_cdf(0.25) / std::sqrt(2.0);
        double analytic_median = 1.0 / (4.0 * z * z);
        std::vector<double> draws(100000);
        for (auto& d : draws) d = sample_positive_stable(0.5, rng);
        std::nth_element(draws.begin(), draws.begin() + draws.size() / 2, draws.end());
        double emp = draws[draws.size() / 2];
        CHECK(std::abs(emp - analytic_median) / analytic_median < 0.03);
    }
    SECTION("rejects out-of-range index") {
        CHECK_THROWS_AS(sample_positive_stable(0.0, rng), input_error);
        CHECK_THROWS_AS(sample_positive_stable(1.5, rng), input_error);
    }
}
