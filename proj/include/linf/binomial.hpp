#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "linf/numeric.hpp"

namespace linf {

enum class CiMethod { ClopperPearson, Thulin, EmpiricalBernstein };

struct BinomialCi {
    double lower = 0.0;
    double upper = 1.0;
    CiMethod method = CiMethod::ClopperPearson;
};

// P(Y <= y) for Y ~ Bin(n, theta). Terms are exponentiated log binomial
// weights and accumulated with compensation, so the value is stable for n
// in the tens of thousands.
inline double binomial_cdf(std::int64_t y, std::int64_t n, double theta) {
    if (n < 1) throw std::invalid_argument("binomial_cdf: n must be >= 1");
    if (y < 0 || y > n) throw std::invalid_argument("binomial_cdf: y out of [0,n]");
    if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("binomial_cdf: theta outside [0,1]");
    if (y == n) return 1.0;
    if (theta == 0.0) return 1.0;
    if (theta == 1.0) return 0.0;  // y < n here
    const double lt = std::log(theta);
    const double lq = std::log1p(-theta);
    const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
    CompensatedSum s;
    for (std::int64_t j = 0; j <= y; ++j) {
        const double lw = lgn - std::lgamma(static_cast<double>(j) + 1.0) -
                          std::lgamma(static_cast<double>(n - j) + 1.0) +
                          static_cast<double>(j) * lt + static_cast<double>(n - j) * lq;
        s.add(std::exp(lw));
    }
    const double v = s.value();
    return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

namespace detail {

// Solves f(theta) = target for f nonincreasing in theta on [0,1].
// 80 halvings pin the root to ~1e-24, far below the 1e-10 contract.
template <typename F>
double bisect_decreasing(F&& f, double target) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Exact two-sided interval: theta_l solves F(y-1;n,theta) = 1 - delta/2
// (0 when y = 0), theta_u solves F(y;n,theta) = delta/2 (1 when y = n).
inline BinomialCi clopper_pearson(std::int64_t y, std::int64_t n, double delta) {
    if (n < 1) throw std::invalid_argument("clopper_pearson: n must be >= 1");
    if (y < 0 || y > n) throw std::invalid_argument("clopper_pearson: y out of [0,n]");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("clopper_pearson: delta outside (0,1)");
    BinomialCi ci;
    ci.method = CiMethod::ClopperPearson;
    const double half = delta / 2.0;
    ci.lower = (y == 0) ? 0.0
                        : detail::bisect_decreasing(
                              [&](double t) { return binomial_cdf(y - 1, n, t); }, 1.0 - half);
    ci.upper = (y == n) ? 1.0
                        : detail::bisect_decreasing(
                              [&](double t) { return binomial_cdf(y, n, t); }, half);
    return ci;
}

// Upper-q standard normal quantile: z with Phi(z) = 1 - q.
// Rational initial guess (Acklam) refined by one Newton step through erfc;
// absolute error stays below 1e-8 over (0,1).
inline double normal_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("normal_quantile: q outside (0,1)");
    const double p = 1.0 - q;

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
    constexpr double plow = 0.02425;

    double x;
    if (p < plow) {
        const double r = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
            ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
    } else if (p <= 1.0 - plow) {
        const double r = p - 0.5;
        const double s = r * r;
        x = (((((a[0] * s + a[1]) * s + a[2]) * s + a[3]) * s + a[4]) * s + a[5]) * r /
            (((((b[0] * s + b[1]) * s + b[2]) * s + b[3]) * s + b[4]) * s + 1.0);
    } else {
        const double r = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
            ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
    }

    // Newton through the tail-accurate erfc form of Phi.
    const double cdf = 0.5 * std::erfc(-x / std::sqrt(2.0));
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    if (pdf > 0.0) x -= (cdf - p) / pdf;
    return x;
}

// Normal-approximation endpoints with the second-order correction that makes
// the interval length exactly 2 z sqrt(th(1-th)/n) + 1/n before clamping.
// Stated only for interior outcomes y in {1..n-1}.
inline BinomialCi thulin_endpoints(std::int64_t y, std::int64_t n, double delta) {
    if (n < 1) throw std::invalid_argument("thulin_endpoints: n must be >= 1");
    if (y <= 0 || y >= n)
        throw std::out_of_range("thulin_endpoints: y must lie in {1..n-1}");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("thulin_endpoints: delta outside (0,1)");
    const double nn = static_cast<double>(n);
    const double th = static_cast<double>(y) / nn;
    const double z = normal_quantile(delta / 2.0);
    const double halfwidth = z * std::sqrt(th * (1.0 - th) / nn);
    const double z2 = z * z;
    BinomialCi ci;
    ci.method = CiMethod::Thulin;
    ci.lower = th - halfwidth + ((1.0 - 2.0 * th) * z2 - 1.0 - th) / (3.0 * nn);
    ci.upper = th + halfwidth + ((1.0 - 2.0 * th) * z2 + 2.0 - th) / (3.0 * nn);
    ci.lower = std::max(0.0, std::min(1.0, ci.lower));
    ci.upper = std::max(0.0, std::min(1.0, ci.upper));
    return ci;
}

// Two-sided empirical-Bernstein radius:
//   sqrt(5 th(1-th) ln(2/delta) / n) + (5/n) ln(2/delta).
inline double empirical_bernstein(double theta_hat, std::uint64_t n, double delta) {
    if (n == 0) throw std::invalid_argument("empirical_bernstein: n must be >= 1");
    if (!(theta_hat >= 0.0 && theta_hat <= 1.0))
        throw std::invalid_argument("empirical_bernstein: theta_hat outside [0,1]");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("empirical_bernstein: delta outside (0,1)");
    const double nn = static_cast<double>(n);
    const double l = std::log(2.0 / delta);
    return std::sqrt(5.0 * theta_hat * (1.0 - theta_hat) * l / nn) + 5.0 * l / nn;
}

}  // namespace linf
