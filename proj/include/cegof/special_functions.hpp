#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "cegof/errors.hpp"

namespace cegof {

inline constexpr double pi = 3.14159265358979323846;

/// Standard normal CDF.
inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// Standard normal PDF.
inline double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi);
}

/// Inverse standard normal CDF (quantile function).
///
/// Acklam's rational approximation followed by one Halley polish step
/// against erfc, which brings the result to near machine precision.
inline double inv_norm_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw input_error("inv_norm_cdf: p must lie strictly in (0,1), got " +
                          std::to_string(p));
    }

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};

    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // Halley step: e = F(x) - p, u = e / F'(x).
    double e = norm_cdf(x) - p;
    double u = e / norm_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

/// Digamma function psi(x) for x > 0.
///
/// Upward recurrence into the asymptotic regime (x >= 6), then the
/// Bernoulli-number expansion.
inline double digamma(double x) {
    if (!(x > 0.0)) {
        throw input_error("digamma: x must be positive, got " + std::to_string(x));
    }
    double result = 0.0;
    while (x < 6.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    double inv = 1.0 / x;
    double inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12.0 -
                      inv2 * (1.0 / 120.0 -
                              inv2 * (1.0 / 252.0 -
                                      inv2 * (1.0 / 240.0 -
                                              inv2 * (1.0 / 132.0 -
                                                      inv2 * (691.0 / 32760.0))))));
    return result;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Deterministic, splittable random stream (xoshiro256** core).
///
/// The same (seed, stream_id) pair yields the identical sequence on every
/// run; distinct stream_ids derived from one master seed give independent
/// streams, so per-replicate streams can be handed to worker threads.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id) {
        std::uint64_t sm = seed ^ detail::mix64(stream_id * 0x9E3779B97F4A7C15ULL + 1ULL);
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Derive an independent child stream; deterministic in (this, child_id).
    RngStream split(std::uint64_t child_id) const {
        return RngStream(seed_, detail::mix64(stream_id_ ^ (child_id + 0xD1B54A32D192ED03ULL)));
    }

    std::uint64_t next_u64() {
        std::uint64_t result = rotl(state_[1] * 5ULL, 7) * 9ULL;
        std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform draw strictly inside (0,1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal draw via quantile inversion.
    double normal() { return inv_norm_cdf(uniform()); }

    /// Exponential(1) draw.
    double exponential() { return -std::log(uniform()); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_[4];
};

/// One draw from the positive stable law with Laplace transform
/// exp(-s^alpha_inv), via the Kanter/Chambers-Mallows-Stuck construction.
/// alpha_inv = 1 is the degenerate point mass at 1.
inline double sample_positive_stable(double alpha_inv, RngStream& rng) {
    if (!(alpha_inv > 0.0 && alpha_inv <= 1.0)) {
        throw input_error("sample_positive_stable: index must lie in (0,1], got " +
                          std::to_string(alpha_inv));
    }
    if (alpha_inv == 1.0) return 1.0;

    const double beta = alpha_inv;
    const double theta = pi * rng.uniform();
    const double w = rng.exponential();

    // log A(theta) of the Kanter representation, kept in logs to avoid
    // overflow for beta near 0 or 1.
    double log_a = (beta / (1.0 - beta)) * std::log(std::sin(beta * theta)) +
                   std::log(std::sin((1.0 - beta) * theta)) -
                   (1.0 / (1.0 - beta)) * std::log(std::sin(theta));
    return std::exp(((1.0 - beta) / beta) * (log_a - std::log(w)));
}

}  // namespace cegof
