#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "cegof/errors.hpp"
#include "cegof/special_functions.hpp"

namespace cegof {

/// N x d observations, columns = variables.
using SampleMatrix = Eigen::MatrixXd;

/// N x d rank-based margins, entries strictly inside (0,1).
using PseudoObservations = Eigen::MatrixXd;

/// Empirical-copula pseudo-observations: per-column ranks divided by N+1.
///
/// Ties are broken by a random permutation drawn from tie_seed, so each
/// column is exactly {1/(N+1), ..., N/(N+1)} and downstream nearest-neighbor
/// distances never collapse to zero. The tie-break keys are drawn per row
/// independently of the data values, which keeps the transform invariant
/// under strictly increasing per-column maps.
inline PseudoObservations to_pseudo_obs(const SampleMatrix& x, RngStream tie_seed) {
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    if (n < 2) {
        throw input_error("to_pseudo_obs: need at least 2 rows, got " + std::to_string(n));
    }
    if (!x.allFinite()) {
        throw input_error("to_pseudo_obs: input contains non-finite entries");
    }

    PseudoObservations u(n, d);
    std::vector<std::uint64_t> keys(static_cast<std::size_t>(n));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < d; ++j) {
        for (auto& k : keys) k = tie_seed.next_u64();
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            if (x(a, j) != x(b, j)) return x(a, j) < x(b, j);
            return keys[static_cast<std::size_t>(a)] < keys[static_cast<std::size_t>(b)];
        });
        for (Eigen::Index r = 0; r < n; ++r) {
            u(order[static_cast<std::size_t>(r)], j) =
                static_cast<double>(r + 1) / static_cast<double>(n + 1);
        }
    }
    return u;
}

}  // namespace cegof
