#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cegof/rank_transform.hpp"

using namespace cegof;

TEST_CASE("ranks divided by N+1") {
    SampleMatrix x(3, 1);
    x << 3.2, 1.1, 2.5;
    auto u = to_pseudo_obs(x, RngStream(1));
    CHECK(u(0, 0) == Catch::Approx(0.75));
    CHECK(u(1, 0) == Catch::Approx(0.25));
    CHECK(u(2, 0) == Catch::Approx(0.50));
}

TEST_CASE("tied values become a permutation of the tie-free ranks") {
    SampleMatrix x(2, 1);
    x << 5.0, 5.0;
    auto u = to_pseudo_obs(x, RngStream(11));
    std::vector<double> col{u(0, 0), u(1, 0)};
    std::sort(col.begin(), col.end());
    CHECK(col[0] == Catch::Approx(1.0 / 3.0));
    CHECK(col[1] == Catch::Approx(2.0 / 3.0));
}

TEST_CASE("each column is exactly the discrete uniform grid") {
    RngStream rng(5);
    SampleMatrix x(40, 3);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.normal();
    auto u = to_pseudo_obs(x, RngStream(6));
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        std::vector<double> col(u.col(j).begin(), u.col(j).end());
        std::sort(col.begin(), col.end());
        for (std::size_t r = 0; r < col.size(); ++r) {
            CHECK(col[r] == static_cast<double>(r + 1) / 41.0);
        }
    }
    CHECK(u.minCoeff() >= 1.0 / 41.0);
    CHECK(u.maxCoeff() <= 40.0 / 41.0);
}

TEST_CASE("invariant under strictly increasing marginal maps, bit for bit") {
    RngStream rng(9);
    SampleMatrix x(50, 2);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = rng.uniform();
    }
    SampleMatrix y = x;
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        y(i, 0) = std::exp(y(i, 0));
        y(i, 1) = 3.0 * y(i, 1) - 7.0;
    }
    auto u1 = to_pseudo_obs(x, RngStream(42));
    auto u2 = to_pseudo_obs(y, RngStream(42));
    CHECK(u1.cwiseEqual(u2).all());
}

TEST_CASE("permuting rows permutes pseudo-observations identically") {
    RngStream rng(13);
    SampleMatrix x(20, 2);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = rng.normal();
    }
    SampleMatrix reversed = x.colwise().reverse();
    auto u = to_pseudo_obs(x, RngStream(3));
    auto u_rev = to_pseudo_obs(reversed, RngStream(3));
    CHECK(u.colwise().reverse().cwiseEqual(u_rev).all());
}

TEST_CASE("input validation") {
    SampleMatrix one_row(1, 2);
    one_row << 0.0, 1.0;
    CHECK_THROWS_AS(to_pseudo_obs(one_row, RngStream(1)), input_error);

    SampleMatrix bad(3, 1);
    bad << 1.0, std::nan(""), 2.0;
    CHECK_THROWS_AS(to_pseudo_obs(bad, RngStream(1)), input_error);
}
