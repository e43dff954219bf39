#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "linf/binomial.hpp"
#include "linf/distribution.hpp"
#include "linf/numeric.hpp"

// Numerical checks for the analytic side constants: the light-mass failure
// probability envelope f(n), the two-point construction used for the minimax
// separation, and the argmax-variance property.

namespace linf {

// f(n) = beta^(-beta) n^2 ((n-beta)/n)^(beta-n) / (2^beta - 2), beta = ln n.
// Evaluated in log space; 2^beta - 2 goes through log1p so large n stays exact.
inline double f_of_n(std::uint64_t n) {
    if (n < 10) throw std::out_of_range("f_of_n: defined for n >= 10");
    const double nn = static_cast<double>(n);
    const double beta = std::log(nn);
    const double log_pow2 = beta * std::log(2.0);
    const double log_denom = log_pow2 + std::log1p(-2.0 * std::exp(-log_pow2));
    const double g = -beta * std::log(beta) + 2.0 * std::log(nn) +
                     (nn - beta) * (std::log(nn) - std::log(nn - beta)) - log_denom;
    return std::exp(g);
}

// Failure probability of the light-mass event, 2 f(n) / n; provably <= 81/n.
inline double light_mass_failure_prob(std::uint64_t n) {
    if (n < 10) throw std::out_of_range("light_mass_failure_prob: defined for n >= 10");
    return 2.0 * f_of_n(n) / static_cast<double>(n);
}

// Two near-identical distributions on n symbols: p puts ln(n)/(2n lnln n) on
// symbol 1 and spreads the rest evenly; q swaps symbols 1 and 2. They are
// far apart in sup norm yet close in KL divergence.
struct FanoPair {
    Distribution p;
    Distribution q;
    std::uint64_t n;
};

inline FanoPair fano_pair(std::uint64_t n) {
    if (n < 16) throw std::out_of_range("fano_pair: needs n >= 16 so lnln(n) > 0");
    const double nn = static_cast<double>(n);
    const double p1 = std::log(nn) / (2.0 * nn * std::log(std::log(nn)));
    if (!(p1 > 0.0 && p1 < 1.0)) throw std::out_of_range("fano_pair: head mass left (0,1)");
    const double rest = (1.0 - p1) / (nn - 1.0);
    std::vector<double> p(n, rest);
    p[0] = p1;
    // close the compensated-sum residue on a bulk coordinate
    CompensatedSum s;
    for (double x : p) s.add(x);
    p[n - 1] += 1.0 - s.value();
    std::vector<double> q(p);
    std::swap(q[0], q[1]);
    return FanoPair{Distribution(std::move(p)), Distribution(std::move(q)), n};
}

// sum_i p_i ln(p_i/q_i) with 0 ln(0/.) := 0; requires q_i = 0 => p_i = 0.
// The shorter vector is zero-padded.
inline double kl(const Distribution& p, const Distribution& q) {
    const auto& pp = p.probs();
    const auto& qq = q.probs();
    const std::size_t len = std::max(pp.size(), qq.size());
    CompensatedSum s;
    for (std::size_t i = 0; i < len; ++i) {
        const double pi = i < pp.size() ? pp[i] : 0.0;
        const double qi = i < qq.size() ? qq[i] : 0.0;
        if (pi == 0.0) continue;
        if (qi == 0.0) throw std::invalid_argument("kl: absolute continuity violated (q_i = 0 < p_i)");
        s.add(pi * (std::log(pi) - std::log(qi)));
    }
    const double v = s.value();
    return v < 0.0 ? 0.0 : v;
}

// First-order floor on the expected half-width of any valid interval for the
// empirically most frequent symbol: z_{delta/2} sqrt(p_top(1-p_top)/n). The
// O(1/n) remainder is omitted; treat the value as a reference line.
inline double selective_lb(double p_top, std::uint64_t n, double delta) {
    if (!(p_top > 0.0 && p_top <= 1.0)) throw std::invalid_argument("selective_lb: p_top outside (0,1]");
    if (n == 0) throw std::invalid_argument("selective_lb: n must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("selective_lb: delta outside (0,1)");
    return normal_quantile(delta / 2.0) * std::sqrt(p_top * (1.0 - p_top) / static_cast<double>(n));
}

// max_i p_i(1-p_i) equals p_(1)(1-p_(1)) where p_(1) is the largest mass:
// direct monotonicity when every mass is <= 1/2, and the mirror symmetry of
// p(1-p) around 1/2 otherwise.
inline bool argmax_variance_check(const Distribution& d) {
    const double top = d.top_mass();
    return std::abs(v_star(d) - top * (1.0 - top)) <= 1e-12;
}

}  // namespace linf
