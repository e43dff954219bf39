#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "linf/distribution.hpp"
#include "linf/numeric.hpp"

// Simultaneous sup-norm deviation bounds for the multinomial MLE.
//
// Every moment-type bound is evaluated in log space: products of the form
// k^(m-k) * n^k * x^k are combined as (m-k)ln k + k ln n + k ln x and reduced
// with log-sum-exp, since k^(m-k) alone overflows double near m ~ 60.
// Natural logarithms are used throughout, including log(1/delta).

namespace linf {

enum class Method {
    Baseline,
    Th1Oracle,
    Th1WorstCase,
    Th2,
    Cor21,
    Th3Ub1,
    Th3Ub2,
    Th3Ub3,
    Th4,
};

inline const char* method_token(Method m) {
    switch (m) {
        case Method::Baseline: return "baseline";
        case Method::Th1Oracle: return "th1-oracle";
        case Method::Th1WorstCase: return "th1-worst";
        case Method::Th2: return "th2";
        case Method::Cor21: return "cor21";
        case Method::Th3Ub1: return "th3-ub1";
        case Method::Th3Ub2: return "th3-ub2";
        case Method::Th3Ub3: return "th3-ub3";
        case Method::Th4: return "th4";
    }
    return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
    for (Method m : {Method::Baseline, Method::Th1Oracle, Method::Th1WorstCase, Method::Th2,
                     Method::Cor21, Method::Th3Ub1, Method::Th3Ub2, Method::Th3Ub3, Method::Th4}) {
        if (s == method_token(m)) return m;
    }
    return std::nullopt;
}

// Radius computable from the sample alone, versus needing the true p.
inline bool is_data_dependent(Method m) {
    return m == Method::Th2 || m == Method::Cor21 || m == Method::Th4;
}
inline bool needs_truth(Method m) {
    return m == Method::Th1Oracle || m == Method::Th3Ub1 || m == Method::Th3Ub2 ||
           m == Method::Th3Ub3;
}
// Methods whose guarantee is stated only for n >= 81.
inline bool requires_n81(Method m) {
    return m == Method::Th3Ub1 || m == Method::Th3Ub2 || m == Method::Th3Ub3 || m == Method::Th4;
}
inline bool uses_moment_order(Method m) {
    return m == Method::Th1Oracle || m == Method::Th1WorstCase || m == Method::Th2 ||
           m == Method::Cor21;
}

// Which bound to evaluate and with what budget. delta is the total failure
// probability; methods that split it take delta1/delta2 (default split
// 0.99/0.01). m is the even moment order; unset means the per-method
// analytic default.
struct BoundSpec {
    Method method = Method::Baseline;
    double delta = 0.05;
    std::optional<double> delta1;
    std::optional<double> delta2;
    std::optional<int> m;

    void validate() const {
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("BoundSpec: delta must lie in (0,1)");
        if (delta1 && !(*delta1 > 0.0 && *delta1 < 1.0))
            throw std::invalid_argument("BoundSpec: delta1 must lie in (0,1)");
        if (delta2 && !(*delta2 > 0.0 && *delta2 < 1.0))
            throw std::invalid_argument("BoundSpec: delta2 must lie in (0,1)");
        if (delta1 && delta2 && *delta1 + *delta2 > delta + 1e-12)
            throw std::invalid_argument("BoundSpec: delta1 + delta2 must not exceed delta");
        if (m && (*m < 2 || *m % 2 != 0))
            throw std::invalid_argument("BoundSpec: m must be an even integer >= 2");
    }

    // Budget split used by the two-stage bounds when not given explicitly.
    std::pair<double, double> split() const {
        if (delta1 && delta2) return {*delta1, *delta2};
        return {0.99 * delta, 0.01 * delta};
    }
};

struct BoundResult {
    Method method = Method::Baseline;
    double radius = 0.0;
    std::optional<int> m_used;
    double failure_prob = 0.0;
    bool vacuous = false;  // failure_prob >= 1: the cell carries no guarantee
    std::map<std::string, double> components;
};

namespace detail {

inline void require_even_m(int m) {
    if (m < 2 || m % 2 != 0) throw std::invalid_argument("m must be an even integer >= 2");
}

inline void require_delta01(double d, const char* what) {
    if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument(std::string(what) + " must lie in (0,1)");
}

// log sum_i x_i^k from precomputed log x_i (zero entries are skipped by the
// caller; an empty list means the sum is exactly 0).
inline double log_power_sum(std::span<const double> log_x, int k) {
    double mx = kNegInf;
    for (double lx : log_x) mx = std::max(mx, lx * k);
    if (mx == kNegInf) return kNegInf;
    double s = 0.0;
    for (double lx : log_x) s += std::exp(lx * k - mx);
    return mx + std::log(s);
}

inline std::vector<double> log_variances(std::span<const double> probs) {
    std::vector<double> lv;
    lv.reserve(probs.size());
    for (double p : probs) {
        const double v = p * (1.0 - p);
        if (v > 0.0) lv.push_back(std::log(v));
    }
    return lv;
}

}  // namespace detail

// sqrt(1/n) + sqrt(ln(1/delta)/(2n)). Components expose the two addends plus
// the conservative bounded-difference variant sqrt(1/n) + sqrt(2 ln(1/delta)/n)
// (per-coordinate changes counted as 2/n), which is the benchmark figure that
// data-dependent bounds are usually quoted against at census scale.
inline BoundResult baseline_bound(std::uint64_t n, double delta) {
    if (n == 0) throw std::invalid_argument("baseline_bound: n must be >= 1");
    detail::require_delta01(delta, "baseline_bound: delta");
    const double nn = static_cast<double>(n);
    const double mean_term = std::sqrt(1.0 / nn);
    const double dev_term = std::sqrt(std::log(1.0 / delta) / (2.0 * nn));
    BoundResult r;
    r.method = Method::Baseline;
    r.radius = mean_term + dev_term;
    r.failure_prob = delta;
    r.components["mean_term"] = mean_term;
    r.components["deviation_term"] = dev_term;
    r.components["conservative_radius"] = mean_term + std::sqrt(2.0 * std::log(1.0 / delta) / nn);
    return r;
}

// Leading worst-case factor (1/sqrt(n)) * (sqrt(m/2)/delta^(1/m)) * e^(-1/2+1/m),
// evaluated for real m > 0 (used by the analytic m-tuning checks).
inline double th1_leading_term(std::uint64_t n, double delta, double m) {
    return (1.0 / std::sqrt(static_cast<double>(n))) * std::sqrt(m / 2.0) *
           std::exp(std::log(1.0 / delta) / m) * std::exp(-0.5 + 1.0 / m);
}

// Even m minimizing the worst-case leading term: nearest even integer to
// 2 ln(1/delta) + 2, never below 2.
inline int optimal_m_data_independent(double delta) {
    detail::require_delta01(delta, "optimal_m_data_independent: delta");
    return round_to_even_min2(2.0 * std::log(1.0 / delta) + 2.0);
}

// Oracle moment bound:
//   radius = (1/n) * ( (1/delta) * sum_{k=1..m/2} k^(m-k) n^k sum_i p_i^k (1-p_i)^k )^(1/m).
// Requires even m with 2 <= m <= n so the k-sum stays inside the validity
// range of the underlying moment inequality.
inline BoundResult th1_oracle_bound(const Distribution& p, std::uint64_t n, double delta, int m) {
    detail::require_even_m(m);
    if (static_cast<std::uint64_t>(m) > n) throw std::invalid_argument("th1_oracle_bound: m must not exceed n");
    detail::require_delta01(delta, "th1_oracle_bound: delta");
    const auto lv = detail::log_variances(p.probs());
    const double ln_n = std::log(static_cast<double>(n));
    std::vector<double> terms;
    terms.reserve(m / 2);
    for (int k = 1; k <= m / 2; ++k) {
        const double lps = detail::log_power_sum(lv, k);
        if (lps == kNegInf) continue;
        terms.push_back((m - k) * std::log(static_cast<double>(k)) + k * ln_n + lps);
    }
    const double log_inner = log_sum_exp(terms);
    BoundResult r;
    r.method = Method::Th1Oracle;
    r.m_used = m;
    r.failure_prob = delta;
    r.radius = log_inner == kNegInf
                   ? 0.0
                   : std::exp((std::log(1.0 / delta) + log_inner) / m) / static_cast<double>(n);
    r.components["log_moment_sum"] = log_inner;
    return r;
}

// Worst-case envelope of the oracle bound: sum_i p_i^k(1-p_i)^k replaced by
// exp(-k+1).
inline BoundResult th1_worstcase_bound(std::uint64_t n, double delta, int m) {
    detail::require_even_m(m);
    detail::require_delta01(delta, "th1_worstcase_bound: delta");
    const double ln_n = std::log(static_cast<double>(n));
    std::vector<double> terms;
    terms.reserve(m / 2);
    for (int k = 1; k <= m / 2; ++k) {
        terms.push_back((m - k) * std::log(static_cast<double>(k)) + k * ln_n +
                        (1.0 - static_cast<double>(k)));
    }
    const double log_inner = log_sum_exp(terms);
    BoundResult r;
    r.method = Method::Th1WorstCase;
    r.m_used = m;
    r.failure_prob = delta;
    r.radius = std::exp((std::log(1.0 / delta) + log_inner) / m) / static_cast<double>(n);
    r.components["log_moment_sum"] = log_inner;
    r.components["leading_term"] = th1_leading_term(n, delta, static_cast<double>(m));
    return r;
}

namespace detail {

// Per-coordinate sensitivity of (p(1-p))^k to a 1/n shift; cubic is k^3 for
// the safe variant and k(k-1)(k-2) for the tighter one.
inline double log_shift_gap(int k, std::uint64_t n, bool cubic_full) {
    const double ln_n = std::log(static_cast<double>(n));
    const double ln2 = std::log(2.0);
    const double la = std::log(static_cast<double>(k)) - ln_n - (k - 1) * 2.0 * ln2;
    const double cubic = cubic_full ? 3.0 * std::pow(static_cast<double>(k), 3)
                                    : 3.0 * k * (k - 1.0) * (k - 2.0);
    const double lb = cubic > 0.0 ? std::log(cubic) - 3.0 * ln_n - (2 * k - 5) * ln2 : kNegInf;
    return log_add_exp(la, lb);
}

inline double log_epsilon(std::uint64_t n, double delta2, int m, bool cubic_full) {
    const double l1d2 = std::log(1.0 / delta2);
    if (l1d2 == 0.0) return kNegInf;  // delta2 -> 1 collapses the term
    const double ln_n = std::log(static_cast<double>(n));
    std::vector<double> terms;
    terms.reserve(m / 2);
    for (int k = 1; k <= m / 2; ++k) {
        terms.push_back((m - k) * std::log(static_cast<double>(k)) + k * ln_n +
                        log_shift_gap(k, n, cubic_full));
    }
    return 0.5 * std::log(static_cast<double>(n) * l1d2 / 2.0) + log_sum_exp(terms);
}

}  // namespace detail

// Concentration slack for replacing true variances by empirical ones:
//   eps = sqrt(n/2 ln(1/delta2)) * sum_{k=1..m/2} k^(m-k) n^k
//            (k/(n 4^(k-1)) + 3k^3/(n^3 2^(2k-5))).
// The variant with 3k(k-1)(k-2) instead of 3k^3 (zero cubic part for k <= 2)
// is exposed through epsilon_term_reduced for diagnostics.
inline double epsilon_term(std::uint64_t n, double delta2, int m) {
    detail::require_even_m(m);
    detail::require_delta01(delta2, "epsilon_term: delta2");
    return std::exp(detail::log_epsilon(n, delta2, m, /*cubic_full=*/true));
}

inline double epsilon_term_reduced(std::uint64_t n, double delta2, int m) {
    detail::require_even_m(m);
    detail::require_delta01(delta2, "epsilon_term: delta2");
    return std::exp(detail::log_epsilon(n, delta2, m, /*cubic_full=*/false));
}

// Analytic even-m defaults. The data-dependent moment bound tunes the
// worst-case leading factor, giving m near ln(1/delta1)+2; the relaxed
// corollary minimizes m/delta1^(1/m), giving m near ln(1/delta1). Both are
// clamped to [2, n].
inline int th2_auto_m(double delta1, std::uint64_t n) {
    int m = round_to_even_min2(std::log(1.0 / delta1) + 2.0);
    const int cap = static_cast<int>(std::min<std::uint64_t>(n, 1u << 20));
    if (m > cap) m = cap - (cap % 2);
    return std::max(m, 2);
}

inline int cor21_auto_m(double delta1, std::uint64_t n) {
    int m = round_to_even_min2(std::log(1.0 / delta1));
    const int cap = static_cast<int>(std::min<std::uint64_t>(n, 1u << 20));
    if (m > cap) m = cap - (cap % 2);
    return std::max(m, 2);
}

// Worst-case-optimal order for the data-independent bounds, clamped to n.
inline int th1_auto_m(double delta, std::uint64_t n) {
    int m = optimal_m_data_independent(delta);
    const int cap = static_cast<int>(std::min<std::uint64_t>(n, 1u << 20));
    if (m > cap) m = cap - (cap % 2);
    return std::max(m, 2);
}

// Data-dependent moment bound:
//   radius = (1/n) * ( (1/delta1)(n/(n-1)) *
//            ( sum_i sum_{k=1..m/2} k^(m-k) n^k (ph_i(1-ph_i))^k + eps ) )^(1/m)
// with eps = epsilon_term(n, delta2, m). Total budget delta1 + delta2.
inline BoundResult th2_bound(const MleEstimate& phat, double delta1, double delta2,
                             std::optional<int> m_opt = std::nullopt) {
    if (phat.n < 2) throw std::invalid_argument("th2_bound: n must be >= 2 (n/(n-1) is singular at n=1)");
    detail::require_delta01(delta1, "th2_bound: delta1");
    detail::require_delta01(delta2, "th2_bound: delta2");
    const std::uint64_t n = phat.n;
    int m = m_opt ? *m_opt : th2_auto_m(delta1, n);
    detail::require_even_m(m);
    if (static_cast<std::uint64_t>(m) > n) throw std::invalid_argument("th2_bound: m must not exceed n");

    const auto lv = detail::log_variances(phat.probs);
    const double ln_n = std::log(static_cast<double>(n));
    std::vector<double> terms;
    terms.reserve(m / 2 + 1);
    for (int k = 1; k <= m / 2; ++k) {
        const double lps = detail::log_power_sum(lv, k);
        if (lps == kNegInf) continue;
        terms.push_back((m - k) * std::log(static_cast<double>(k)) + k * ln_n + lps);
    }
    const double log_eps = detail::log_epsilon(n, delta2, m, /*cubic_full=*/true);
    const double log_main = log_sum_exp(terms);
    const double log_total = log_add_exp(log_main, log_eps);

    BoundResult r;
    r.method = Method::Th2;
    r.m_used = m;
    r.failure_prob = delta1 + delta2;
    const double nn = static_cast<double>(n);
    r.radius = log_total == kNegInf
                   ? 0.0
                   : std::exp((std::log(1.0 / delta1) + std::log(nn / (nn - 1.0)) + log_total) / m) / nn;
    r.components["log_moment_sum"] = log_main;
    r.components["epsilon"] = std::exp(log_eps);
    r.components["epsilon_reduced_cubic"] = std::exp(detail::log_epsilon(n, delta2, m, false));
    return r;
}

// Relaxed two-term form:
//   (m/delta1^(1/m)) (1/n) (sum_{k<=m/2} sum_i (n ph_i(1-ph_i))^k)^(1/m)
//   + a (m/delta1^(1/m)) (ln(1/delta2))^(1/2m) (n^-(1+1/m)/2 + 24 n^-(1+5/m)/2),
// a = sqrt(2 e^(1/e)).
inline BoundResult cor21_bound(const MleEstimate& phat, double delta1, double delta2,
                               std::optional<int> m_opt = std::nullopt) {
    if (phat.n < 2) throw std::invalid_argument("cor21_bound: n must be >= 2");
    detail::require_delta01(delta1, "cor21_bound: delta1");
    detail::require_delta01(delta2, "cor21_bound: delta2");
    const std::uint64_t n = phat.n;
    int m = m_opt ? *m_opt : cor21_auto_m(delta1, n);
    detail::require_even_m(m);
    if (static_cast<std::uint64_t>(m) > n) throw std::invalid_argument("cor21_bound: m must not exceed n");

    const auto lv = detail::log_variances(phat.probs);
    const double nn = static_cast<double>(n);
    const double ln_n = std::log(nn);
    std::vector<double> terms;
    for (int k = 1; k <= m / 2; ++k) {
        const double lps = detail::log_power_sum(lv, k);
        if (lps == kNegInf) continue;
        terms.push_back(k * ln_n + lps);
    }
    const double log_inner = log_sum_exp(terms);
    const double g = static_cast<double>(m) * std::exp(std::log(1.0 / delta1) / m);
    const double lead = log_inner == kNegInf ? 0.0 : (g / nn) * std::exp(log_inner / m);

    static const double kA = std::sqrt(2.0 * std::exp(std::exp(-1.0)));
    const double l1d2 = std::log(1.0 / delta2);
    const double tail = kA * g * std::pow(l1d2, 1.0 / (2.0 * m)) *
                        (std::pow(nn, -(1.0 + 1.0 / m) / 2.0) + 24.0 * std::pow(nn, -(1.0 + 5.0 / m) / 2.0));

    BoundResult r;
    r.method = Method::Cor21;
    r.m_used = m;
    r.failure_prob = delta1 + delta2;
    r.radius = lead + tail;
    r.components["moment_part"] = lead;
    r.components["concentration_part"] = tail;
    r.components["a_constant"] = kA;
    return r;
}

namespace detail {

inline void require_n81(std::uint64_t n, const char* what) {
    if (n < 81) {
        throw std::out_of_range(std::string(what) +
                                ": requires n >= 81 (stated validity range of the bound)");
    }
}

inline BoundResult th3_with(Method method, double variance_functional, double vstar,
                            std::uint64_t n, double delta) {
    const double nn = static_cast<double>(n);
    const double lead = 2.0 * std::sqrt(variance_functional / nn + vstar / nn * std::log(2.0 / delta));
    const double log_part = 4.0 / (3.0 * nn) * std::log(2.0 * (nn + 1.0) / delta);
    const double res = std::log(nn) / nn;
    BoundResult r;
    r.method = method;
    r.failure_prob = delta + 81.0 / nn;
    r.vacuous = r.failure_prob >= 1.0;
    r.radius = lead + log_part + res;
    r.components["variance_term"] = lead;
    r.components["log_term"] = log_part;
    r.components["residual_term"] = res;
    return r;
}

}  // namespace detail

// Oracle variance-adaptive bounds, valid for n >= 81 with failure budget
// delta + 81/n. Returns the three nested variants driven by V*, phi(v*), and
// v* ln(n+1); the first is never larger than the other two.
inline std::array<BoundResult, 3> th3_bound(const Distribution& p, std::uint64_t n, double delta) {
    detail::require_n81(n, "th3_bound");
    detail::require_delta01(delta, "th3_bound: delta");
    const double vs = v_star(p);
    const double Vs = V_star(p);
    const double nn = static_cast<double>(n);
    return {detail::th3_with(Method::Th3Ub1, Vs, vs, n, delta),
            detail::th3_with(Method::Th3Ub2, phi(vs), vs, n, delta),
            detail::th3_with(Method::Th3Ub3, vs * std::log(nn + 1.0), vs, n, delta)};
}

// Empirical counterpart driven by vhat* = max_i ph_i(1-ph_i):
//   radius = a + 3b^2/2 + b sqrt(a) + 3b sqrt(vhat*)/2,
//   a = (4/3n) ln(2(n+1)/delta) + ln(n)/n,  b = 2 sqrt(ln(n+1)/n + ln(2/delta)/n).
inline BoundResult th4_bound(double vhat_star, std::uint64_t n, double delta) {
    detail::require_n81(n, "th4_bound");
    detail::require_delta01(delta, "th4_bound: delta");
    if (!(vhat_star >= 0.0 && vhat_star <= 0.25))
        throw std::invalid_argument("th4_bound: vhat_star must lie in [0, 0.25]");
    const double nn = static_cast<double>(n);
    const double a = 4.0 / (3.0 * nn) * std::log(2.0 * (nn + 1.0) / delta) + std::log(nn) / nn;
    const double b = 2.0 * std::sqrt(std::log(nn + 1.0) / nn + std::log(2.0 / delta) / nn);
    BoundResult r;
    r.method = Method::Th4;
    r.failure_prob = delta + 81.0 / nn;
    r.vacuous = r.failure_prob >= 1.0;
    r.radius = a + 1.5 * b * b + b * std::sqrt(a) + 1.5 * b * std::sqrt(vhat_star);
    r.components["a"] = a;
    r.components["b"] = b;
    return r;
}

// Upper bound on sup_p |(p(1-p))^k - ((p+1/n)(1-p-1/n))^k|:
//   k/(n 4^(k-1)) + 3k(k-1)(k-2)/(n^3 2^(2k-5)).
inline double taylor_gap(int k, std::uint64_t n) {
    if (k < 1) throw std::invalid_argument("taylor_gap: k must be >= 1");
    if (n < 2) throw std::invalid_argument("taylor_gap: n must be >= 2");
    return std::exp(detail::log_shift_gap(k, n, /*cubic_full=*/false));
}

// Everything evaluate_bound may need; unused fields can stay null.
struct BoundInput {
    const Distribution* truth = nullptr;
    const MleEstimate* estimate = nullptr;
    std::uint64_t n = 0;
};

inline BoundResult evaluate_bound(const BoundSpec& spec, const BoundInput& in) {
    spec.validate();
    const std::uint64_t n = in.n != 0 ? in.n : (in.estimate ? in.estimate->n : 0);
    if (n == 0) throw std::invalid_argument("evaluate_bound: sample size is required");
    if (needs_truth(spec.method) && in.truth == nullptr)
        throw std::invalid_argument("evaluate_bound: method needs the true distribution");
    if (is_data_dependent(spec.method) && in.estimate == nullptr)
        throw std::invalid_argument("evaluate_bound: method needs an empirical estimate");

    switch (spec.method) {
        case Method::Baseline:
            return baseline_bound(n, spec.delta);
        case Method::Th1Oracle:
            return th1_oracle_bound(*in.truth, n, spec.delta,
                                    spec.m ? *spec.m : th1_auto_m(spec.delta, n));
        case Method::Th1WorstCase:
            return th1_worstcase_bound(n, spec.delta,
                                       spec.m ? *spec.m : th1_auto_m(spec.delta, n));
        case Method::Th2: {
            const auto [d1, d2] = spec.split();
            return th2_bound(*in.estimate, d1, d2, spec.m);
        }
        case Method::Cor21: {
            const auto [d1, d2] = spec.split();
            return cor21_bound(*in.estimate, d1, d2, spec.m);
        }
        case Method::Th3Ub1:
            return th3_bound(*in.truth, n, spec.delta)[0];
        case Method::Th3Ub2:
            return th3_bound(*in.truth, n, spec.delta)[1];
        case Method::Th3Ub3:
            return th3_bound(*in.truth, n, spec.delta)[2];
        case Method::Th4:
            return th4_bound(v_star(*in.estimate), n, spec.delta);
    }
    throw std::logic_error("evaluate_bound: unhandled method");
}

}  // namespace linf
