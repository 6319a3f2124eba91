#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace subdiff {

/// Parameter pair of the two-parameter Mittag-Leffler function E_{alpha,mu}.
///
/// The solver stack only ever needs alpha in (0, 1] (time-fractional order)
/// and mu in {1, alpha}, but any mu > 0 is accepted.
struct MLParams {
    double alpha = 0.5;
    double mu = 1.0;
};

namespace detail {

/// Reciprocal gamma 1/Gamma(x) for arbitrary real x.
///
/// Returns 0 at the poles of Gamma (x = 0, -1, -2, ...), treating anything
/// within 1e-12 (relative) of a nonpositive integer as the pole itself:
/// arguments of the form mu - alpha k land near poles only through the
/// rounding of alpha k, and sin(pi x) does not vanish there in floating
/// point. Uses the reflection formula below x = 0.5 so that large negative
/// arguments do not route through tgamma's overflow region; if Gamma(1 - x)
/// itself overflows the result is +-inf, which callers treat as a
/// divergence sentinel.
inline double rgamma(double x) {
    if (x > 0.5) {
        if (x > 175.0) return 0.0;
        return 1.0 / std::tgamma(x);
    }
    const double nearest = std::nearbyint(x);
    if (nearest <= 0.0 && std::fabs(x - nearest) < 1e-12 * std::max(1.0, std::fabs(x)))
        return 0.0;
    const double s = std::sin(std::numbers::pi * x);
    if (s == 0.0) return 0.0;
    const double g = std::tgamma(1.0 - x);
    if (!std::isfinite(g)) {
        return s > 0.0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    }
    return s * g / std::numbers::pi;
}

/// Power series sum_k z^k / Gamma(alpha k + mu), accumulated in long double.
///
/// Individual terms can grow far beyond the final value before decaying, so
/// the extended precision buys roughly three extra decimal digits against
/// the cancellation on the negative axis.
inline double ml_series(double alpha, double mu, double z, int max_terms) {
    const long double lz = std::fabs(static_cast<long double>(z));
    const long double loglz = (lz > 0.0L) ? std::log(lz) : 0.0L;
    long double sum = 0.0L;
    long double comp = 0.0L;  // Kahan compensation
    long double prev_mag = std::numeric_limits<long double>::max();
    for (int k = 0; k < max_terms; ++k) {
        const long double arg = static_cast<long double>(alpha) * k + mu;
        long double term = (k == 0 && lz == 0.0L)
                               ? std::exp(-std::lgamma(arg))
                               : std::exp(k * loglz - std::lgamma(arg));
        if (z < 0.0 && (k & 1)) term = -term;
        const long double yk = term - comp;
        const long double tk = sum + yk;
        comp = (tk - sum) - yk;
        sum = tk;
        const long double mag = std::fabs(term);
        if (k > 1 && mag < prev_mag && mag <= 1e-22L * (std::fabs(sum) + 1e-300L)) break;
        prev_mag = mag;
        if (lz == 0.0L) break;
    }
    return static_cast<double>(sum);
}

/// Algebraic tail sum_{k>=1} z^{-k} / Gamma(mu - alpha k) with truncation at
/// the smallest term (the series is asymptotic, not convergent).
///
/// Whenever mu - alpha k lands on a pole of Gamma the term is absent from
/// the expansion, not small, so poles are skipped without entering the
/// min-term or convergence tests; for rational alpha (mu = alpha above all)
/// they recur periodically and would otherwise end the sum after one term.
inline double ml_asymptotic_tail(double alpha, double mu, double z, int max_terms) {
    double sum = 0.0;
    double prev_mag = std::numeric_limits<double>::max();
    double zpow = 1.0;
    for (int k = 1; k <= max_terms; ++k) {
        zpow /= z;
        const double rg = rgamma(mu - alpha * k);
        if (rg == 0.0) continue;
        const double term = zpow * rg;
        const double mag = std::fabs(term);
        if (!std::isfinite(term) || mag >= prev_mag) break;
        sum += term;
        if (mag <= 1e-20 * (std::fabs(sum) + 1e-300)) break;
        prev_mag = mag;
    }
    return sum;
}

/// Largest |z| the power series can handle before cancellation eats it.
///
/// The peak term magnitude is about exp(|z|^{1/alpha}), so with long double
/// accumulation the series loses roughly |z|^{1/alpha} / ln(10) - 18 digits
/// on the negative axis, while the optimally truncated asymptotic tail is
/// wrong by about exp(-0.9 |z|^{1/alpha}). The errors cross near
/// |z|^{1/alpha} = 21; past 15 the asymptotic side is always the better one.
inline double ml_series_radius(double alpha) {
    const double r = std::pow(21.0, alpha);
    return std::min(15.0, std::max(1.0, r));
}

} // namespace detail

/// Two-parameter Mittag-Leffler function E_{alpha,mu}(z) for real z.
///
/// Dispatch: closed form exp(z) for (alpha, mu) = (1, 1); power series inside
/// an alpha-dependent radius (at most |z| = 15, 250-term cap); exponential or
/// algebraic asymptotic expansion beyond it. Relative accuracy is around
/// 1e-12 on the nonnegative axis and well inside the series radius; on the
/// negative axis both branches degrade towards about 1e-8 in a band around
/// the switchover (that radius balances series cancellation against the
/// asymptotic truncation), and for alpha near 1 the expansion also drops an
/// oscillatory exponential of order exp(-|z|^{1/alpha}) there. Overflow
/// (large positive z with small alpha) yields +inf.
///
/// Throws std::invalid_argument unless alpha in (0, 1] and mu > 0, and
/// std::domain_error for non-finite z.
inline double mittag_leffler(MLParams p, double z) {
    if (!(p.alpha > 0.0) || !(p.alpha <= 1.0))
        throw std::invalid_argument("mittag_leffler: alpha must lie in (0, 1]");
    if (!(p.mu > 0.0))
        throw std::invalid_argument("mittag_leffler: mu must be positive");
    if (!std::isfinite(z))
        throw std::domain_error("mittag_leffler: z must be finite");

    if (p.alpha == 1.0 && p.mu == 1.0) return std::exp(z);
    if (z == 0.0) return detail::rgamma(p.mu);

    constexpr int series_cap = 250;
    constexpr int tail_cap = 120;
    if (std::fabs(z) <= detail::ml_series_radius(p.alpha))
        return detail::ml_series(p.alpha, p.mu, z, series_cap);

    const double tail = detail::ml_asymptotic_tail(p.alpha, p.mu, z, tail_cap);
    if (z < 0.0) return -tail;

    // z large positive: dominant exponential branch plus the algebraic tail.
    const double log_pre =
        (1.0 - p.mu) / p.alpha * std::log(z) + std::pow(z, 1.0 / p.alpha);
    return std::exp(log_pre) / p.alpha - tail;
}

/// Upper envelope for E_{alpha,mu} on [0, z_max].
struct MLBound {
    double value = 0.0;   ///< sampled maximum inflated by 1%
    double z_max = 0.0;   ///< right end of the sampled interval
};

/// Bound max_{z in [0, z_max]} E_{alpha,mu}(z) by dense sampling.
///
/// E_{alpha,mu} is increasing on the nonnegative axis so the endpoint
/// dominates; the 1% inflation covers the evaluation error. Requires
/// z_max >= 0.
inline MLBound ml_bound(MLParams p, double z_max) {
    if (!(z_max >= 0.0))
        throw std::invalid_argument("ml_bound: z_max must be nonnegative");
    constexpr int samples = 257;
    double best = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double z = z_max * i / (samples - 1);
        best = std::max(best, mittag_leffler(p, z));
    }
    return MLBound{1.01 * best, z_max};
}

} // namespace subdiff
