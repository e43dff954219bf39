#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "linf/binomial.hpp"
#include "linf/bounds.hpp"
#include "linf/distribution.hpp"
#include "linf/numeric.hpp"
#include "linf/rng.hpp"
#include "linf/theory.hpp"

// Seeded coverage experiments: draw n samples, compute the MLE, evaluate each
// bound, record whether the true sup-norm deviation stays inside the radius,
// and aggregate per (method, n). Reps are independent work items with derived
// seeds and per-rep result slots, so the thread count never changes the
// report: all reductions run sequentially in rep order after the parallel
// section.

namespace linf {

enum class DeltaRule { Fixed, InverseNSquared };

struct ExperimentConfig {
    explicit ExperimentConfig(Distribution d) : dist(std::move(d)) {}

    Distribution dist;
    std::string label;
    std::vector<std::uint64_t> n_values;
    DeltaRule delta_rule = DeltaRule::Fixed;
    double delta = 0.05;  // used by the Fixed rule
    std::vector<BoundSpec> methods;
    std::uint64_t reps = 10000;
    std::uint64_t seed = 0;
    std::optional<std::size_t> k;  // top-k selective mode
    unsigned threads = 0;          // 0 = hardware concurrency

    void validate() const {
        if (n_values.empty()) throw std::invalid_argument("ExperimentConfig: n_values must be nonempty");
        if (!std::is_sorted(n_values.begin(), n_values.end()))
            throw std::invalid_argument("ExperimentConfig: n_values must be sorted ascending");
        if (reps == 0) throw std::invalid_argument("ExperimentConfig: reps must be >= 1");
        if (methods.empty()) throw std::invalid_argument("ExperimentConfig: no methods requested");
        if (k && (*k == 0 || *k > dist.support_size()))
            throw std::invalid_argument("ExperimentConfig: k must lie in [1, support size]");
    }

    double delta_for(std::uint64_t n) const {
        if (delta_rule == DeltaRule::InverseNSquared) {
            return 1.0 / (static_cast<double>(n) * static_cast<double>(n));
        }
        return delta;
    }
};

// One (method, n) aggregate. Cells whose method precondition fails at this n
// are marked skipped instead of failing the run.
struct CellResult {
    std::string method;
    std::uint64_t n = 0;
    double delta = 0.0;
    bool skipped = false;
    std::string note;
    double coverage_rate = 0.0;
    std::uint64_t covered = 0;
    double mean_radius = 0.0;
    double oracle_quantile = 0.0;  // (1-delta)-quantile of the simulated sup deviation
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
};

// Per-n reference lines for the selective (top-k) experiments.
struct ReferenceLine {
    std::uint64_t n = 0;
    double delta = 0.0;
    double oracle_sup_quantile = 0.0;
    double oracle_top1_quantile = 0.0;
    double selective_lower_bound = 0.0;
};

struct CoverageReport {
    std::string label;
    std::uint64_t seed = 0;
    std::uint64_t reps = 0;
    std::optional<std::size_t> k;
    std::vector<CellResult> cells;
    std::vector<ReferenceLine> refs;  // top-k mode only
    // per n: how often each symbol entered the selected top-k set
    std::vector<std::pair<std::uint64_t, std::vector<std::uint64_t>>> selection_counts;
};

namespace detail {

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

template <typename Fn>
void parallel_reps(std::uint64_t reps, unsigned threads, Fn&& per_rep) {
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, reps));
    if (threads <= 1) {
        for (std::uint64_t r = 0; r < reps; ++r) per_rep(r);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::uint64_t chunk = (reps + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::uint64_t lo = t * chunk;
        const std::uint64_t hi = std::min<std::uint64_t>(reps, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &per_rep]() {
            for (std::uint64_t r = lo; r < hi; ++r) per_rep(r);
        });
    }
    for (auto& th : pool) th.join();
}

// Top-k indices by count, ties broken by ascending symbol index.
inline void topk_indices(const std::vector<std::uint64_t>& counts, std::size_t k,
                         std::vector<std::uint32_t>& scratch, std::uint32_t* out) {
    scratch.resize(counts.size());
    std::iota(scratch.begin(), scratch.end(), 0u);
    std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k),
                      scratch.end(), [&](std::uint32_t a, std::uint32_t b) {
                          if (counts[a] != counts[b]) return counts[a] > counts[b];
                          return a < b;
                      });
    std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k), out);
}

inline double sorted_quantile(std::vector<double> values, double level) {
    const std::uint64_t rank = quantile_rank(level, values.size());
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                     values.end());
    return values[rank - 1];
}

struct CellEvaluator {
    BoundSpec spec;  // per-cell spec with resolved delta
    bool skipped = false;
    std::string note;
    bool constant = false;  // oracle/data-independent radius
    double const_radius = 0.0;
};

inline std::vector<CellEvaluator> prepare_cells(const ExperimentConfig& cfg,
                                                const Distribution& dist, std::uint64_t n,
                                                double delta) {
    std::vector<CellEvaluator> cells;
    cells.reserve(cfg.methods.size());
    for (const BoundSpec& base : cfg.methods) {
        CellEvaluator ce;
        ce.spec = base;
        if (ce.spec.delta != delta) {
            // per-cell delta (e.g. the 1/n^2 rule); any explicit split is stale
            ce.spec.delta = delta;
            ce.spec.delta1.reset();
            ce.spec.delta2.reset();
        }
        if (requires_n81(ce.spec.method) && n < 81) {
            ce.skipped = true;
            ce.note = "skipped: requires n >= 81";
        } else if (uses_moment_order(ce.spec.method) && ce.spec.m &&
                   static_cast<std::uint64_t>(*ce.spec.m) > n) {
            ce.skipped = true;
            ce.note = "skipped: m exceeds n";
        } else if (!is_data_dependent(ce.spec.method)) {
            BoundInput in;
            in.truth = &dist;
            in.n = n;
            ce.constant = true;
            ce.const_radius = evaluate_bound(ce.spec, in).radius;
        }
        cells.push_back(std::move(ce));
    }
    return cells;
}

}  // namespace detail

// Empirical (1-delta)-quantile of the sup deviation over seeded trials, using
// the order statistic at rank ceil((1-delta)*reps) with no interpolation (an
// interpolated value could overshoot the quantile it is meant to lower-bound).
inline double oracle_quantile(const Distribution& dist, std::uint64_t n, double delta,
                              std::uint64_t reps, std::uint64_t seed) {
    if (reps == 0) throw std::invalid_argument("oracle_quantile: reps must be >= 1");
    if (n == 0) throw std::invalid_argument("oracle_quantile: n must be >= 1");
    if (static_cast<double>(reps) * delta < 1.0) {
        std::cerr << "oracle_quantile: reps < 1/delta, the upper order statistic is a coarse "
                     "estimate of the quantile\n";
    }
    DiscreteSampler sampler(dist);
    std::vector<double> devs(reps);
    std::vector<std::uint64_t> counts;
    MleEstimate est;
    est.n = n;
    for (std::uint64_t r = 0; r < reps; ++r) {
        Rng rng(stream_seed(seed, r));
        sampler.draw_counts(n, rng, counts);
        est.probs.resize(counts.size());
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < counts.size(); ++i)
            est.probs[i] = static_cast<double>(counts[i]) * inv;
        devs[r] = sup_dev(dist, est);
    }
    return detail::sorted_quantile(std::move(devs), 1.0 - delta);
}

// The coverage engine. With cfg.k set, the per-rep deviation is restricted to
// the k most frequent sample symbols and the report gains reference lines
// plus a row for naive per-symbol Clopper-Pearson intervals.
inline CoverageReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const bool topk_mode = cfg.k.has_value();
    const std::size_t k = topk_mode ? *cfg.k : 0;
    const unsigned threads = detail::resolve_threads(cfg.threads);

    CoverageReport report;
    report.label = cfg.label;
    report.seed = cfg.seed;
    report.reps = cfg.reps;
    report.k = cfg.k;

    const Distribution& dist = cfg.dist;
    DiscreteSampler sampler(dist);
    const double p_top = dist.top_mass();

    for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
        const std::uint64_t n = cfg.n_values[ni];
        const double delta = cfg.delta_for(n);
        const std::uint64_t cell_seed = stream_seed(cfg.seed, ni);
        auto cells = detail::prepare_cells(cfg, dist, n, delta);

        std::vector<std::size_t> active;  // non-skipped, data-dependent
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (!cells[c].skipped && !cells[c].constant) active.push_back(c);
        }

        std::vector<double> devs(cfg.reps);
        std::vector<std::vector<double>> radii(active.size());
        for (auto& v : radii) v.assign(cfg.reps, 0.0);
        std::vector<double> topdevs(topk_mode ? cfg.reps : 0);
        std::vector<double> top1devs(topk_mode ? cfg.reps : 0);
        // per-rep selected symbols and their counts, reduced sequentially below
        std::vector<std::uint32_t> sel_idx(topk_mode ? cfg.reps * k : 0);
        std::vector<std::uint64_t> sel_cnt(topk_mode ? cfg.reps * k : 0);

        auto body = [&](std::uint64_t rep) {
            thread_local std::vector<std::uint64_t> counts;
            thread_local std::vector<std::uint32_t> scratch;
            Rng rng(stream_seed(cell_seed, rep));
            sampler.draw_counts(n, rng, counts);
            MleEstimate est;
            est.n = n;
            est.probs.resize(counts.size());
            const double inv = 1.0 / static_cast<double>(n);
            for (std::size_t i = 0; i < counts.size(); ++i)
                est.probs[i] = static_cast<double>(counts[i]) * inv;
            devs[rep] = sup_dev(dist, est);

            BoundInput in;
            in.truth = &dist;
            in.estimate = &est;
            in.n = n;
            for (std::size_t a = 0; a < active.size(); ++a) {
                radii[a][rep] = evaluate_bound(cells[active[a]].spec, in).radius;
            }

            if (topk_mode) {
                detail::topk_indices(counts, k, scratch, sel_idx.data() + rep * k);
                double td = 0.0;
                for (std::size_t j = 0; j < k; ++j) {
                    const std::uint32_t idx = sel_idx[rep * k + j];
                    sel_cnt[rep * k + j] = counts[idx];
                    td = std::max(td, std::abs(dist[idx] - est.probs[idx]));
                }
                topdevs[rep] = td;
                const std::uint32_t first = sel_idx[rep * k];
                top1devs[rep] = std::abs(dist[first] - est.probs[first]);
            }
        };
        detail::parallel_reps(cfg.reps, threads, body);

        const double oracle_sup = detail::sorted_quantile(devs, 1.0 - delta);
        const std::vector<double>& target = topk_mode ? topdevs : devs;

        std::size_t a = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            CellResult row;
            row.method = method_token(cells[c].spec.method);
            row.n = n;
            row.delta = delta;
            row.reps = cfg.reps;
            row.seed = cfg.seed;
            row.oracle_quantile = oracle_sup;
            if (cells[c].skipped) {
                row.skipped = true;
                row.note = cells[c].note;
                row.coverage_rate = std::nan("");
                row.mean_radius = std::nan("");
            } else if (cells[c].constant) {
                const double radius = cells[c].const_radius;
                std::uint64_t covered = 0;
                for (std::uint64_t r = 0; r < cfg.reps; ++r) covered += target[r] <= radius;
                row.covered = covered;
                row.coverage_rate = static_cast<double>(covered) / static_cast<double>(cfg.reps);
                row.mean_radius = radius;
            } else {
                const std::vector<double>& rr = radii[a++];
                std::uint64_t covered = 0;
                CompensatedSum mean;
                for (std::uint64_t r = 0; r < cfg.reps; ++r) {
                    covered += target[r] <= rr[r];
                    mean.add(rr[r]);
                }
                row.covered = covered;
                row.coverage_rate = static_cast<double>(covered) / static_cast<double>(cfg.reps);
                row.mean_radius = mean.value() / static_cast<double>(cfg.reps);
            }
            report.cells.push_back(std::move(row));
        }

        if (topk_mode) {
            // naive per-symbol Clopper-Pearson on the selected set; the CP
            // interval depends only on the observed count, so memoize per y
            std::map<std::uint64_t, BinomialCi> cp;
            std::uint64_t covered = 0;
            std::vector<std::uint64_t> selected(dist.support_size(), 0);
            for (std::uint64_t r = 0; r < cfg.reps; ++r) {
                bool ok = true;
                for (std::size_t j = 0; j < k; ++j) {
                    const std::uint32_t idx = sel_idx[r * k + j];
                    const std::uint64_t y = sel_cnt[r * k + j];
                    ++selected[idx];
                    auto it = cp.find(y);
                    if (it == cp.end()) {
                        it = cp.emplace(y, clopper_pearson(static_cast<std::int64_t>(y),
                                                           static_cast<std::int64_t>(n), delta))
                                 .first;
                    }
                    if (dist[idx] < it->second.lower || dist[idx] > it->second.upper) ok = false;
                }
                covered += ok;
            }
            CellResult naive;
            naive.method = "naive-cp";
            naive.n = n;
            naive.delta = delta;
            naive.reps = cfg.reps;
            naive.seed = cfg.seed;
            naive.oracle_quantile = oracle_sup;
            naive.covered = covered;
            naive.coverage_rate = static_cast<double>(covered) / static_cast<double>(cfg.reps);
            naive.mean_radius = std::nan("");  // one interval per symbol, no single radius
            report.cells.push_back(std::move(naive));

            ReferenceLine ref;
            ref.n = n;
            ref.delta = delta;
            ref.oracle_sup_quantile = oracle_sup;
            ref.oracle_top1_quantile = detail::sorted_quantile(std::move(top1devs), 1.0 - delta);
            ref.selective_lower_bound = selective_lb(p_top, n, delta);
            report.refs.push_back(ref);
            report.selection_counts.emplace_back(n, std::move(selected));
        }
    }
    return report;
}

inline CoverageReport run_coverage(const ExperimentConfig& cfg) {
    if (cfg.k) throw std::invalid_argument("run_coverage: use topk_experiment for top-k configs");
    return run_experiment(cfg);
}

inline CoverageReport topk_experiment(const ExperimentConfig& cfg) {
    if (!cfg.k) throw std::invalid_argument("topk_experiment: config must set k");
    return run_experiment(cfg);
}

// Exhaustive coverage by enumerating every count vector (no sampling).
// Refuses when the composition count C(n+A-1, A-1) exceeds 1e6.
inline double exact_coverage(const Distribution& dist, std::uint64_t n, const BoundSpec& spec) {
    spec.validate();
    if (n == 0) throw std::invalid_argument("exact_coverage: n must be >= 1");
    const std::size_t A = dist.support_size();
    const double log_comps = std::lgamma(static_cast<double>(n + A)) -
                             std::lgamma(static_cast<double>(n + 1)) -
                             std::lgamma(static_cast<double>(A));
    if (log_comps > std::log(1e6)) {
        throw std::invalid_argument("exact_coverage: composition count exceeds 1e6");
    }
    if (requires_n81(spec.method) && n < 81) {
        throw std::out_of_range("exact_coverage: method requires n >= 81");
    }

    const auto& p = dist.probs();
    std::vector<double> log_p(A, kNegInf);
    for (std::size_t i = 0; i < A; ++i) {
        if (p[i] > 0.0) log_p[i] = std::log(p[i]);
    }
    const double lg_n = std::lgamma(static_cast<double>(n) + 1.0);

    double const_radius = 0.0;
    const bool constant = !is_data_dependent(spec.method);
    if (constant) {
        BoundInput in;
        in.truth = &dist;
        in.n = n;
        const_radius = evaluate_bound(spec, in).radius;
    }

    std::vector<std::uint64_t> counts(A, 0);
    counts[0] = n;
    CompensatedSum covered;
    MleEstimate est;
    est.n = n;
    est.probs.resize(A);

    // odometer over all compositions of n into A parts
    while (true) {
        bool feasible = true;
        double log_pmf = lg_n;
        for (std::size_t i = 0; i < A; ++i) {
            if (counts[i] > 0 && log_p[i] == kNegInf) {
                feasible = false;
                break;
            }
            log_pmf -= std::lgamma(static_cast<double>(counts[i]) + 1.0);
            if (counts[i] > 0) log_pmf += static_cast<double>(counts[i]) * log_p[i];
        }
        if (feasible) {
            const double inv = 1.0 / static_cast<double>(n);
            for (std::size_t i = 0; i < A; ++i)
                est.probs[i] = static_cast<double>(counts[i]) * inv;
            double radius = const_radius;
            if (!constant) {
                BoundInput in;
                in.truth = &dist;
                in.estimate = &est;
                in.n = n;
                radius = evaluate_bound(spec, in).radius;
            }
            if (sup_dev(dist, est) <= radius) covered.add(std::exp(log_pmf));
        }

        // next composition: collapse the leading block into the next cell
        std::size_t i = 0;
        while (i + 1 < A && counts[i] == 0) ++i;
        if (i + 1 >= A) break;
        const std::uint64_t head = counts[i];
        counts[i] = 0;
        counts[0] = head - 1;
        counts[i + 1] += 1;
    }
    const double v = covered.value();
    return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

}  // namespace linf
