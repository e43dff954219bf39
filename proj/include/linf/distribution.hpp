#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "linf/numeric.hpp"
#include "linf/rng.hpp"

namespace linf {

// An exact finite-support probability vector. Entries must be nonnegative
// and sum to 1 within 1e-12 (compensated summation, so large supports do
// not trip the tolerance). Zero-mass entries are allowed and counted in
// the support size. Immutable after construction.
class Distribution {
 public:
    explicit Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
        if (probs_.empty()) throw std::invalid_argument("Distribution: empty probability vector");
        CompensatedSum s;
        for (double p : probs_) {
            if (!(p >= 0.0)) throw std::invalid_argument("Distribution: negative or NaN mass");
            s.add(p);
        }
        const double total = s.value();
        if (std::abs(total - 1.0) > 1e-12) {
            throw std::invalid_argument("Distribution: masses sum to " + std::to_string(total) +
                                        ", expected 1 within 1e-12");
        }
    }

    const std::vector<double>& probs() const { return probs_; }
    std::size_t support_size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }

    // Largest single mass.
    double top_mass() const { return *std::max_element(probs_.begin(), probs_.end()); }

 private:
    std::vector<double> probs_;
};

// Symbol counts from an i.i.d. sample; n is the sample size (sum of counts).
struct CountVector {
    std::vector<std::uint64_t> counts;
    std::uint64_t n = 0;

    explicit CountVector(std::vector<std::uint64_t> c) : counts(std::move(c)) {
        for (std::uint64_t x : counts) n += x;
        if (n == 0) throw std::invalid_argument("CountVector: sample size must be positive");
    }
};

// The plug-in estimate probs[i] = counts[i]/n; every entry is an integer
// multiple of 1/n.
struct MleEstimate {
    std::vector<double> probs;
    std::uint64_t n = 0;
};

// p_i proportional to i^(-s) on {1..alphabet}.
inline Distribution zipf(std::size_t alphabet, double skew) {
    if (alphabet == 0) throw std::invalid_argument("zipf: alphabet size must be >= 1");
    if (!(skew > 0.0)) throw std::invalid_argument("zipf: skew must be > 0");
    std::vector<double> w(alphabet);
    CompensatedSum z;
    for (std::size_t i = 0; i < alphabet; ++i) {
        w[i] = std::pow(static_cast<double>(i + 1), -skew);
        z.add(w[i]);
    }
    const double total = z.value();
    for (double& x : w) x /= total;
    // nudge so the compensated total is exactly 1 after rounding
    CompensatedSum s;
    for (double x : w) s.add(x);
    w[0] += 1.0 - s.value();
    return Distribution(std::move(w));
}

inline Distribution uniform(std::size_t alphabet) {
    if (alphabet == 0) throw std::invalid_argument("uniform: alphabet size must be >= 1");
    std::vector<double> w(alphabet, 1.0 / static_cast<double>(alphabet));
    CompensatedSum s;
    for (double x : w) s.add(x);
    w[0] += 1.0 - s.value();
    return Distribution(std::move(w));
}

// Inverse-CDF lookup table; O(log A) per draw. Deterministic for a fixed
// seed: the table is a plain left-to-right running sum and draws use
// Rng::next_unit, both fully specified.
class DiscreteSampler {
 public:
    explicit DiscreteSampler(const Distribution& dist) : cum_(dist.support_size()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < cum_.size(); ++i) {
            acc += dist[i];
            cum_[i] = acc;
        }
        cum_.back() = std::max(cum_.back(), 1.0);  // u in [0,1) always lands
    }

    std::size_t draw(Rng& rng) const {
        const double u = rng.next_unit();
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
        return it == cum_.end() ? cum_.size() - 1
                                : static_cast<std::size_t>(it - cum_.begin());
    }

    void draw_counts(std::uint64_t n, Rng& rng, std::vector<std::uint64_t>& out) const {
        out.assign(cum_.size(), 0);
        for (std::uint64_t i = 0; i < n; ++i) ++out[draw(rng)];
    }

 private:
    std::vector<double> cum_;
};

inline CountVector sample(const Distribution& dist, std::uint64_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
    DiscreteSampler sampler(dist);
    Rng rng(seed);
    std::vector<std::uint64_t> counts;
    sampler.draw_counts(n, rng, counts);
    return CountVector(std::move(counts));
}

inline MleEstimate mle(const CountVector& cv) {
    MleEstimate est;
    est.n = cv.n;
    est.probs.resize(cv.counts.size());
    const double inv = 1.0 / static_cast<double>(cv.n);
    for (std::size_t i = 0; i < cv.counts.size(); ++i) {
        est.probs[i] = static_cast<double>(cv.counts[i]) * inv;
    }
    return est;
}

// max_i |a_i - b_i|; the shorter vector is zero-padded.
inline double sup_dev(std::span<const double> a, std::span<const double> b) {
    const std::size_t len = std::max(a.size(), b.size());
    double best = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        const double x = i < a.size() ? a[i] : 0.0;
        const double y = i < b.size() ? b[i] : 0.0;
        best = std::max(best, std::abs(x - y));
    }
    return best;
}

inline double sup_dev(const Distribution& p, const MleEstimate& q) {
    return sup_dev(std::span<const double>(p.probs()), std::span<const double>(q.probs));
}

inline double sup_dev(const Distribution& p, const Distribution& q) {
    return sup_dev(std::span<const double>(p.probs()), std::span<const double>(q.probs()));
}

// max_i p_i(1-p_i). Entries must lie in [0,1].
inline double v_star(std::span<const double> probs) {
    double best = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("v_star: entry outside [0,1]");
        best = std::max(best, p * (1.0 - p));
    }
    return best;
}

inline double v_star(const Distribution& d) { return v_star(std::span<const double>(d.probs())); }
inline double v_star(const MleEstimate& e) { return v_star(std::span<const double>(e.probs)); }

// Sorts masses in non-increasing order (stable, so ties keep their original
// relative order) and returns max_i v_i * ln(i+1) over the sorted vector,
// with 1-based i.
inline double V_star(std::span<const double> probs) {
    std::vector<double> sorted(probs.begin(), probs.end());
    std::stable_sort(sorted.begin(), sorted.end(), std::greater<double>());
    double best = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double p = sorted[i];
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("V_star: entry outside [0,1]");
        const double v = p * (1.0 - p);
        best = std::max(best, v * std::log(static_cast<double>(i) + 2.0));
    }
    return best;
}

inline double V_star(const Distribution& d) { return V_star(std::span<const double>(d.probs())); }

// t * ln(1/t) on [0,1], with phi(0) := 0 by continuity.
inline double phi(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("phi: argument outside [0,1]");
    if (t == 0.0) return 0.0;
    return t * std::log(1.0 / t);
}

}  // namespace linf
