#pragma once

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "linf/bounds.hpp"
#include "linf/distribution.hpp"
#include "linf/ingest.hpp"
#include "linf/montecarlo.hpp"

namespace linf {

// Shortest double representation that round-trips (%.17g fallback).
inline std::string fmt_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// FNV-1a, used to stamp artifact file names with their config.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
    return buf;
}

// --- distribution / counts CSV (two columns, header required, UTF-8) ---

inline void save_distribution_csv(const std::filesystem::path& path, const Distribution& d) {
    std::ostringstream out;
    out << "symbol,probability\n";
    for (std::size_t i = 0; i < d.support_size(); ++i) {
        out << i + 1 << ',' << fmt_double(d[i]) << '\n';
    }
    write_text_file(path, out.str());
}

inline Distribution load_distribution_csv(const std::filesystem::path& path) {
    const FrequencyTable t = load_frequency_csv(path, FreqMode::Proportions);
    return to_distribution(t);
}

inline void save_counts_csv(const std::filesystem::path& path, const CountVector& cv) {
    std::ostringstream out;
    out << "symbol,count\n";
    for (std::size_t i = 0; i < cv.counts.size(); ++i) {
        out << i + 1 << ',' << cv.counts[i] << '\n';
    }
    write_text_file(path, out.str());
}

inline CountVector load_counts_csv(const std::filesystem::path& path) {
    const FrequencyTable t = load_frequency_csv(path, FreqMode::Counts);
    std::vector<std::uint64_t> counts;
    counts.reserve(t.entries.size());
    for (const auto& e : t.entries) {
        const double v = e.value;
        if (v != std::floor(v)) {
            throw std::runtime_error("counts csv: non-integer count for label '" + e.label + "'");
        }
        counts.push_back(static_cast<std::uint64_t>(v));
    }
    return CountVector(std::move(counts));
}

// --- JSON forms ---

inline nlohmann::json to_json(const BoundResult& r) {
    nlohmann::json j;
    j["method"] = method_token(r.method);
    j["radius"] = r.radius;
    if (r.m_used) {
        j["m_used"] = *r.m_used;
    } else {
        j["m_used"] = nullptr;
    }
    j["failure_prob"] = r.failure_prob;
    j["vacuous"] = r.vacuous;
    j["components"] = r.components;
    return j;
}

inline nlohmann::json to_json(const FrequencyTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : t.entries) {
        rows.push_back({{"label", e.label}, {"count", e.value}, {"prob", e.value / t.total}});
    }
    return nlohmann::json{{"total", t.total}, {"entries", rows}};
}

inline nlohmann::json to_json(const CoverageReport& rep, const std::string& config_echo = "") {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : rep.cells) {
        nlohmann::json j{{"method", c.method},
                         {"n", c.n},
                         {"delta", c.delta},
                         {"skipped", c.skipped},
                         {"reps", c.reps},
                         {"seed", c.seed}};
        if (c.skipped) {
            j["note"] = c.note;
        } else {
            j["coverage_rate"] = c.coverage_rate;
            j["covered"] = c.covered;
            j["mean_radius"] = std::isnan(c.mean_radius) ? nlohmann::json() : nlohmann::json(c.mean_radius);
            j["oracle_quantile"] = c.oracle_quantile;
        }
        cells.push_back(std::move(j));
    }
    nlohmann::json out{{"label", rep.label}, {"seed", rep.seed}, {"reps", rep.reps}, {"cells", cells}};
    if (!config_echo.empty()) out["config"] = config_echo;
    if (rep.k) {
        out["k"] = *rep.k;
        nlohmann::json refs = nlohmann::json::array();
        for (const auto& r : rep.refs) {
            refs.push_back({{"n", r.n},
                            {"delta", r.delta},
                            {"oracle_sup_quantile", r.oracle_sup_quantile},
                            {"oracle_top1_quantile", r.oracle_top1_quantile},
                            {"selective_lower_bound", r.selective_lower_bound}});
        }
        out["reference_lines"] = refs;
        nlohmann::json sel = nlohmann::json::array();
        for (const auto& [n, hist] : rep.selection_counts) {
            nlohmann::json nonzero = nlohmann::json::object();
            for (std::size_t i = 0; i < hist.size(); ++i) {
                if (hist[i] > 0) nonzero[std::to_string(i + 1)] = hist[i];
            }
            sel.push_back({{"n", n}, {"times_selected", nonzero}});
        }
        out["selection_counts"] = sel;
    }
    return out;
}

// One row per method x n.
inline std::string to_csv(const CoverageReport& rep) {
    std::ostringstream out;
    out << "label,method,n,delta,coverage_rate,mean_radius,oracle_quantile,reps,seed,skipped,note\n";
    for (const auto& c : rep.cells) {
        out << rep.label << ',' << c.method << ',' << c.n << ',' << fmt_double(c.delta) << ','
            << (c.skipped ? "nan" : fmt_double(c.coverage_rate)) << ','
            << (c.skipped ? "nan" : fmt_double(c.mean_radius)) << ','
            << (c.skipped ? "nan" : fmt_double(c.oracle_quantile)) << ',' << c.reps << ',' << c.seed
            << ',' << (c.skipped ? 1 : 0) << ',' << c.note << '\n';
    }
    return out.str();
}

}  // namespace linf
