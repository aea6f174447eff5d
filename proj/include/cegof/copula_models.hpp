#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>

#include "cegof/errors.hpp"
#include "cegof/rank_transform.hpp"
#include "cegof/special_functions.hpp"

namespace cegof {

enum class Family { gaussian, gumbel };

inline std::string family_name(Family f) {
    return f == Family::gaussian ? "gaussian" : "gumbel";
}

inline Family parse_family(const std::string& name) {
    if (name == "gaussian") return Family::gaussian;
    if (name == "gumbel") return Family::gumbel;
    throw input_error("unknown copula family: " + name);
}

struct GaussianCopulaParams {
    Eigen::MatrixXd sigma_rho;   // symmetric, unit diagonal, positive definite
    bool floored = false;        // eigenvalue floor was applied during fitting
};

struct GumbelCopulaParams {
    double alpha = 1.0;  // alpha >= 1; alpha = 1 is independence
};

using CopulaParams = std::variant<GaussianCopulaParams, GumbelCopulaParams>;

struct FitResult {
    CopulaParams params;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool boundary = false;  // optimizer ended on a search bound
};

namespace detail {

inline void check_interior(const Eigen::VectorXd& u) {
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        if (!(u[j] > 0.0 && u[j] < 1.0)) {
            throw input_error("copula density: point must lie strictly in (0,1)^d");
        }
    }
}

inline Eigen::LLT<Eigen::MatrixXd> checked_llt(const Eigen::MatrixXd& sigma) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw parameter_error("correlation matrix is not positive definite");
    }
    return llt;
}

}  // namespace detail

/// log c_n(u) = -1/2 log|Sigma| - 1/2 z^T (Sigma^-1 - I) z with
/// z = inv_norm_cdf applied elementwise.
inline double gaussian_log_density(const Eigen::VectorXd& u, const GaussianCopulaParams& p) {
    detail::check_interior(u);
    auto llt = detail::checked_llt(p.sigma_rho);

    Eigen::VectorXd z(u.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) z[j] = inv_norm_cdf(u[j]);

    double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    double quad = z.dot(llt.solve(z)) - z.squaredNorm();
    return -0.5 * log_det - 0.5 * quad;
}

/// Log of the bivariate Gumbel copula density, evaluated in the log domain.
/// With w_i = (-ln u_i)^alpha and t = w_1 + w_2:
///   log c = -t^(1/a) + (a-1)[ln(-ln u1)+ln(-ln u2)] - ln u1 - ln u2
///           + (1/a - 2) ln t + ln(t^(1/a) + a - 1)
inline double gumbel_log_density(const Eigen::VectorXd& u, const GumbelCopulaParams& p) {
    if (u.size() != 2) throw input_error("gumbel_log_density: bivariate only");
    detail::check_interior(u);
    if (!(p.alpha >= 1.0)) {
        throw parameter_error("gumbel alpha must be >= 1, got " + std::to_string(p.alpha));
    }
    const double a = p.alpha;
    const double l1 = -std::log(u[0]);
    const double l2 = -std::log(u[1]);
    // log t via log-sum-exp over a*log(l_i), stable for large alpha
    const double x1 = a * std::log(l1);
    const double x2 = a * std::log(l2);
    const double m = std::max(x1, x2);
    const double log_t = m + std::log(std::exp(x1 - m) + std::exp(x2 - m));
    const double t_pow = std::exp(log_t / a);  // t^(1/alpha)
    return -t_pow + (a - 1.0) * (std::log(l1) + std::log(l2)) + l1 + l2 +
           (1.0 / a - 2.0) * log_t + std::log(t_pow + a - 1.0);
}

inline double log_density(const Eigen::VectorXd& u, const CopulaParams& params) {
    return std::visit(
        [&](const auto& p) { return [&] {
            if constexpr (std::is_same_v<std::decay_t<decltype(p)>, GaussianCopulaParams>) {
                return gaussian_log_density(u, p);
            } else {
                return gumbel_log_density(u, p);
            }
        }(); },
        params);
}

/// Plug-in copula entropy under a fitted model: -(1/N) sum_i log c(u_i).
inline double hypothesis_ce(const PseudoObservations& u, const CopulaParams& params) {
    const Eigen::Index n = u.rows();
    if (n < 1) throw input_error("hypothesis_ce: empty input");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double ld = log_density(u.row(i).transpose(), params);
        if (!std::isfinite(ld)) {
            throw estimation_error("hypothesis_ce: non-finite log-density at row " +
                                   std::to_string(i));
        }
        sum += ld;
    }
    return -sum / static_cast<double>(n);
}

namespace detail {

inline long long count_inversions(std::vector<double>& v, std::vector<double>& buf,
                                  std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    std::size_t mid = lo + (hi - lo) / 2;
    long long count = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[i] <= v[j]) {
            buf[k++] = v[i++];
        } else {
            count += static_cast<long long>(mid - i);
            buf[k++] = v[j++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + static_cast<long>(lo), buf.begin() + static_cast<long>(hi),
              v.begin() + static_cast<long>(lo));
    return count;
}

template <int Col>
inline bool has_ties(const Eigen::MatrixXd& u) {
    std::vector<double> col(u.col(Col).begin(), u.col(Col).end());
    std::sort(col.begin(), col.end());
    return std::adjacent_find(col.begin(), col.end()) != col.end();
}

}  // namespace detail

/// Exact sample Kendall rank correlation (concordant minus discordant over
/// all pairs). Tie-free data takes an O(n log n) inversion-counting path;
/// ties fall back to the pairwise sum.
inline double kendall_tau(const PseudoObservations& u) {
    if (u.cols() != 2) throw input_error("kendall_tau: bivariate only");
    const Eigen::Index n = u.rows();
    if (n < 2) throw input_error("kendall_tau: need at least 2 rows");
    const double total = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);

    if (!detail::has_ties<0>(u) && !detail::has_ties<1>(u)) {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::sort(order.begin(), order.end(),
                  [&](Eigen::Index a, Eigen::Index b) { return u(a, 0) < u(b, 0); });
        std::vector<double> y(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = u(order[i], 1);
        std::vector<double> buf(y.size());
        long long inversions = detail::count_inversions(y, buf, 0, y.size());
        return 1.0 - 2.0 * static_cast<double>(inversions) / total;
    }

    long long concordant = 0, discordant = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double s = (u(i, 0) - u(j, 0)) * (u(i, 1) - u(j, 1));
            if (s > 0) ++concordant;
            else if (s < 0) ++discordant;
        }
    }
    return static_cast<double>(concordant - discordant) / total;
}

/// Semiparametric Gaussian-copula fit: Pearson correlation of the normal
/// scores inv_norm_cdf(u), with an eigenvalue floor (1e-8, rescaled back to
/// unit diagonal) when the estimate is near-singular.
inline FitResult fit_gaussian(const PseudoObservations& u) {
    const Eigen::Index n = u.rows();
    const Eigen::Index d = u.cols();
    if (n <= d) throw input_error("fit_gaussian: need N > d");

    Eigen::MatrixXd z(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) z(i, j) = inv_norm_cdf(u(i, j));

    Eigen::MatrixXd centered = z.rowwise() - z.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
    if ((sd.array() <= 0.0).any()) {
        throw parameter_error("fit_gaussian: degenerate normal scores (zero variance)");
    }
    Eigen::MatrixXd corr = sd.cwiseInverse().asDiagonal() * cov * sd.cwiseInverse().asDiagonal();
    corr = 0.5 * (corr + corr.transpose());
    corr.diagonal().setOnes();

    GaussianCopulaParams params{corr, false};
    constexpr double eig_floor = 1e-8;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
    if (eig.eigenvalues().minCoeff() < eig_floor) {
        Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(eig_floor);
        Eigen::MatrixXd fixed = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
        Eigen::VectorXd scale = fixed.diagonal().cwiseSqrt().cwiseInverse();
        params.sigma_rho = scale.asDiagonal() * fixed * scale.asDiagonal();
        params.sigma_rho = 0.5 * (params.sigma_rho + params.sigma_rho.transpose());
        params.sigma_rho.diagonal().setOnes();
        params.floored = true;
    }

    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        ll += gaussian_log_density(u.row(i).transpose(), params);
    }
    return FitResult{params, ll, 0, false};
}

namespace detail {

/// Brent's bounded scalar minimization (golden section + parabolic steps).
template <typename F>
double brent_minimize(F f, double lo, double hi, double tol, int& iterations) {
    const double golden = 0.5 * (3.0 - std::sqrt(5.0));
    double a = lo, b = hi;
    double x = a + golden * (b - a), w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    iterations = 0;
    for (int iter = 0; iter < 200; ++iter) {
        ++iterations;
        double mid = 0.5 * (a + b);
        double tol1 = tol * std::abs(x) + 1e-12;
        double tol2 = 2.0 * tol1;
        if (std::abs(x - mid) <= tol2 - 0.5 * (b - a)) break;
        bool use_golden = true;
        if (std::abs(e) > tol1) {
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            double e_old = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * e_old) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                double cand = x + d;
                if (cand - a < tol2 || b - cand < tol2) d = (mid > x) ? tol1 : -tol1;
                use_golden = false;
            }
        }
        if (use_golden) {
            e = (x < mid) ? b - x : a - x;
            d = golden * e;
        }
        double cand = (std::abs(d) >= tol1) ? x + d : x + ((d > 0) ? tol1 : -tol1);
        double fc = f(cand);
        if (fc <= fx) {
            if (cand < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = cand; fx = fc;
        } else {
            if (cand < x) a = cand; else b = cand;
            if (fc <= fw || w == x) {
                v = w; fv = fw;
                w = cand; fw = fc;
            } else if (fc <= fv || v == x || v == w) {
                v = cand; fv = fc;
            }
        }
    }
    return x;
}

}  // namespace detail

inline constexpr double gumbel_alpha_min = 1.0 + 1e-6;
inline constexpr double gumbel_alpha_max = 50.0;

/// Bivariate Gumbel MLE over alpha in [1+1e-6, 50], Brent search to 1e-6,
/// started from the Kendall-tau inversion alpha0 = 1/(1-tau). The returned
/// likelihood never falls below the initializer's.
inline FitResult fit_gumbel(const PseudoObservations& u) {
    const Eigen::Index n = u.rows();
    if (u.cols() != 2) throw input_error("fit_gumbel: bivariate only");
    if (n < 10) throw input_error("fit_gumbel: need N >= 10");

    auto neg_ll = [&](double alpha) {
        GumbelCopulaParams p{alpha};
        double ll = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) ll += gumbel_log_density(u.row(i).transpose(), p);
        return -ll;
    };

    double tau = kendall_tau(u);
    double alpha0 = tau < 1.0 ? 1.0 / (1.0 - tau) : gumbel_alpha_max;
    alpha0 = std::clamp(alpha0, gumbel_alpha_min, gumbel_alpha_max);

    int iterations = 0;
    double alpha_hat =
        detail::brent_minimize(neg_ll, gumbel_alpha_min, gumbel_alpha_max, 1e-6, iterations);
    if (neg_ll(alpha0) < neg_ll(alpha_hat)) alpha_hat = alpha0;

    bool boundary = alpha_hat >= gumbel_alpha_max - 1e-3;
    return FitResult{GumbelCopulaParams{alpha_hat}, -neg_ll(alpha_hat), iterations, boundary};
}

inline FitResult fit_copula(const PseudoObservations& u, Family family) {
    return family == Family::gaussian ? fit_gaussian(u) : fit_gumbel(u);
}

/// Draws z ~ N(0, Sigma) through the Cholesky factor and maps back through
/// the normal CDF; all outputs lie strictly inside (0,1).
inline Eigen::MatrixXd sample_gaussian_copula(const GaussianCopulaParams& p, Eigen::Index n,
                                              RngStream& rng) {
    if (n < 1) throw input_error("sample_gaussian_copula: n must be >= 1");
    auto llt = detail::checked_llt(p.sigma_rho);
    const Eigen::Index d = p.sigma_rho.rows();
    Eigen::MatrixXd out(n, d);
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) z[j] = rng.normal();
        Eigen::VectorXd corr_z = llt.matrixL() * z;
        for (Eigen::Index j = 0; j < d; ++j) out(i, j) = norm_cdf(corr_z[j]);
    }
    return out;
}

/// Marshall-Olkin sampler: S positive stable with index 1/alpha, then
/// u_i = exp(-(E_i / S)^(1/alpha)) with E_i ~ Exp(1).
inline Eigen::MatrixXd sample_gumbel_copula(const GumbelCopulaParams& p, Eigen::Index n,
                                            RngStream& rng) {
    if (!(p.alpha >= 1.0)) {
        throw parameter_error("sample_gumbel_copula: alpha must be >= 1");
    }
    if (n < 1) throw input_error("sample_gumbel_copula: n must be >= 1");
    Eigen::MatrixXd out(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (p.alpha == 1.0) {
            out(i, 0) = rng.uniform();
            out(i, 1) = rng.uniform();
            continue;
        }
        double s = sample_positive_stable(1.0 / p.alpha, rng);
        for (Eigen::Index j = 0; j < 2; ++j) {
            out(i, j) = std::exp(-std::pow(rng.exponential() / s, 1.0 / p.alpha));
        }
    }
    return out;
}

enum class Margin { uniform, standard_normal, exponential };

inline Margin parse_margin(const std::string& name) {
    if (name == "uniform") return Margin::uniform;
    if (name == "standard-normal") return Margin::standard_normal;
    if (name == "exponential") return Margin::exponential;
    throw input_error("unknown margin: " + name);
}

inline std::string margin_name(Margin m) {
    switch (m) {
        case Margin::uniform: return "uniform";
        case Margin::standard_normal: return "standard-normal";
        default: return "exponential";
    }
}

/// Push copula-scale data through the inverse CDF of the named margin.
inline SampleMatrix apply_margins(const Eigen::MatrixXd& u, Margin margin) {
    SampleMatrix out(u.rows(), u.cols());
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        for (Eigen::Index j = 0; j < u.cols(); ++j) {
            double v = u(i, j);
            if (!(v > 0.0 && v < 1.0)) {
                throw input_error("apply_margins: entries must lie strictly in (0,1)");
            }
            switch (margin) {
                case Margin::uniform: out(i, j) = v; break;
                case Margin::standard_normal: out(i, j) = inv_norm_cdf(v); break;
                case Margin::exponential: out(i, j) = -std::log1p(-v); break;
            }
        }
    }
    return out;
}

}  // namespace cegof
