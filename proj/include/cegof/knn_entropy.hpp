#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <vector>

#include "cegof/errors.hpp"
#include "cegof/rank_transform.hpp"
#include "cegof/special_functions.hpp"

namespace cegof {

struct EntropyConfig {
    int k = 3;  // neighbor count; metric is fixed to the max-norm
};

namespace detail {

inline double chebyshev(const Eigen::MatrixXd& pts, Eigen::Index a, Eigen::Index b) {
    return (pts.row(a) - pts.row(b)).cwiseAbs().maxCoeff();
}

/// k-th nearest neighbor distances by exhaustive search.
inline std::vector<double> knn_dist_brute(const Eigen::MatrixXd& pts, int k) {
    const Eigen::Index n = pts.rows();
    std::vector<double> eps(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        std::priority_queue<double> heap;  // max-heap of the k best so far
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            double dist = chebyshev(pts, i, j);
            if (static_cast<int>(heap.size()) < k) {
                heap.push(dist);
            } else if (dist < heap.top()) {
                heap.pop();
                heap.push(dist);
            }
        }
        eps[static_cast<std::size_t>(i)] = heap.top();
    }
    return eps;
}

/// Static k-d tree over matrix rows, max-norm queries.
class KdTree {
public:
    explicit KdTree(const Eigen::MatrixXd& pts) : pts_(pts), idx_(static_cast<std::size_t>(pts.rows())) {
        std::iota(idx_.begin(), idx_.end(), Eigen::Index{0});
        nodes_.reserve(idx_.size() * 2);
        root_ = build(0, static_cast<Eigen::Index>(idx_.size()), 0);
    }

    /// Distance to the k-th nearest neighbor of row `query`, self excluded.
    double kth_distance(Eigen::Index query, int k) const {
        std::priority_queue<double> heap;
        search(root_, query, k, heap);
        return heap.top();
    }

private:
    struct Node {
        Eigen::Index point = -1;
        int axis = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;
    };

    std::int32_t build(Eigen::Index lo, Eigen::Index hi, int axis) {
        if (lo >= hi) return -1;
        Eigen::Index mid = lo + (hi - lo) / 2;
        std::nth_element(idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi,
                         [&](Eigen::Index a, Eigen::Index b) { return pts_(a, axis) < pts_(b, axis); });
        Node node;
        node.point = idx_[static_cast<std::size_t>(mid)];
        node.axis = axis;
        std::int32_t id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(node);
        int next_axis = (axis + 1) % static_cast<int>(pts_.cols());
        std::int32_t left = build(lo, mid, next_axis);
        std::int32_t right = build(mid + 1, hi, next_axis);
        nodes_[static_cast<std::size_t>(id)].left = left;
        nodes_[static_cast<std::size_t>(id)].right = right;
        return id;
    }

    void search(std::int32_t node_id, Eigen::Index query, int k,
                std::priority_queue<double>& heap) const {
        if (node_id < 0) return;
        const Node& node = nodes_[static_cast<std::size_t>(node_id)];
        if (node.point != query) {
            double dist = chebyshev(pts_, query, node.point);
            if (static_cast<int>(heap.size()) < k) {
                heap.push(dist);
            } else if (dist < heap.top()) {
                heap.pop();
                heap.push(dist);
            }
        }
        double diff = pts_(query, node.axis) - pts_(node.point, node.axis);
        std::int32_t near = diff <= 0 ? node.left : node.right;
        std::int32_t far = diff <= 0 ? node.right : node.left;
        search(near, query, k, heap);
        double radius = static_cast<int>(heap.size()) < k
                            ? std::numeric_limits<double>::infinity()
                            : heap.top();
        if (std::abs(diff) <= radius) search(far, query, k, heap);
    }

    const Eigen::MatrixXd& pts_;
    std::vector<Eigen::Index> idx_;
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

// Exhaustive search is exact and fast enough up to this size; above it a
// k-d tree takes over.
inline constexpr Eigen::Index kBruteForceLimit = 4096;

inline std::vector<double> knn_distances(const Eigen::MatrixXd& pts, int k) {
    if (pts.rows() <= kBruteForceLimit) return knn_dist_brute(pts, k);
    KdTree tree(pts);
    const Eigen::Index n = pts.rows();
    std::vector<double> eps(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        eps[static_cast<std::size_t>(i)] = tree.kth_distance(i, k);
    }
    return eps;
}

}  // namespace detail

/// Kozachenko-Leonenko / Kraskov k-nearest-neighbor differential entropy
/// estimate in nats:  H = -psi(k) + psi(N) + (d/N) * sum_i log eps_i,
/// where eps_i is twice the max-norm distance to the k-th neighbor (the
/// unit-ball volume term vanishes under the max-norm).
inline double knn_entropy(const Eigen::MatrixXd& points, const EntropyConfig& cfg) {
    const Eigen::Index n = points.rows();
    const Eigen::Index d = points.cols();
    if (cfg.k < 1) throw input_error("knn_entropy: k must be >= 1");
    if (n <= cfg.k) {
        throw input_error("knn_entropy: need N > k, got N=" + std::to_string(n) +
                          ", k=" + std::to_string(cfg.k));
    }

    // Duplicate rows make the log of a zero distance undefined; report the
    // offending row up front.
    {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            for (Eigen::Index j = 0; j < d; ++j) {
                if (points(a, j) != points(b, j)) return points(a, j) < points(b, j);
            }
            return false;
        });
        for (std::size_t i = 1; i < order.size(); ++i) {
            if ((points.row(order[i - 1]).array() == points.row(order[i]).array()).all()) {
                throw estimation_error("knn_entropy: duplicate point at row " +
                                       std::to_string(std::max(order[i - 1], order[i])) +
                                       " (zero neighbor distance)");
            }
        }
    }

    auto eps = detail::knn_distances(points, cfg.k);
    // Summing in sorted order makes the estimate exactly invariant to row
    // permutations of the input.
    std::sort(eps.begin(), eps.end());
    double log_sum = 0.0;
    for (double e : eps) {
        if (e <= 0.0) {
            throw estimation_error("knn_entropy: zero k-th neighbor distance");
        }
        log_sum += std::log(2.0 * e);
    }
    return -digamma(cfg.k) + digamma(static_cast<double>(n)) +
           static_cast<double>(d) / static_cast<double>(n) * log_sum;
}

/// Nonparametric copula-entropy estimate: kNN entropy of the
/// pseudo-observations.
inline double true_ce(const PseudoObservations& u, const EntropyConfig& cfg) {
    return knn_entropy(u, cfg);
}

}  // namespace cegof
