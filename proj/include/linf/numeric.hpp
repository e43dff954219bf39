#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace linf {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow; -inf acts as log(0).
inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// log(sum exp(v_i)); empty input yields -inf.
inline double log_sum_exp(std::span<const double> v) {
    double mx = kNegInf;
    for (double x : v) mx = std::max(mx, x);
    if (mx == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

// Neumaier compensated accumulator. Summation order is fixed by the caller,
// which keeps reductions bit-stable regardless of how work was scheduled.
class CompensatedSum {
 public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

 private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_total(std::span<const double> xs) {
    CompensatedSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

// Nearest even integer, floored at 2. Ties (odd integers) round upward.
inline int round_to_even_min2(double x) {
    const long long half = std::llround(x / 2.0);
    const long long m = 2 * half;
    return m < 2 ? 2 : static_cast<int>(m);
}

// 1-based order-statistic rank ceil(q*reps), evaluated with a small slack so
// binary fractions such as 0.95*10000 do not round up to 9501.
inline std::uint64_t quantile_rank(double q, std::uint64_t reps) {
    const double r = q * static_cast<double>(reps);
    auto k = static_cast<std::uint64_t>(std::floor(r));
    if (r - static_cast<double>(k) > 1e-9) ++k;
    if (k < 1) k = 1;
    if (k > reps) k = reps;
    return k;
}

}  // namespace linf
