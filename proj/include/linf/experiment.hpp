#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "linf/config.hpp"
#include "linf/io.hpp"
#include "linf/montecarlo.hpp"
#include "linf/svg.hpp"
#include "linf/version.hpp"

// Glue between flat config files and the coverage engine, plus artifact
// writing (CSV, JSON, SVG, run manifest).
//
// Config keys:
//   distributions = zipf:A:s, uniform:A, csv:path, counts-csv:path, corpus:path
//   n_values      = 100, 1000, 10000
//   delta         = 0.05            (or:  delta = 1/n^2)
//   methods       = baseline, th2, th4, ...
//   m             = auto | even integer     (moment-order methods)
//   reps, seed, k, threads, label_prefix    (optional)

namespace linf {

struct DistSpec {
    Distribution dist;
    std::string label;
};

inline std::vector<DistSpec> parse_distributions(const KvConfig& cfg,
                                                 const std::filesystem::path& base_dir) {
    std::vector<DistSpec> out;
    for (const std::string& item : cfg.get_list("distributions")) {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : item) {
            if (c == ':') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        parts.push_back(cur);
        const std::string& kind = parts[0];
        if (kind == "zipf") {
            if (parts.size() != 3) throw std::runtime_error("config: zipf needs zipf:A:s");
            const auto A = static_cast<std::size_t>(std::stoull(parts[1]));
            const double s = std::stod(parts[2]);
            out.push_back({zipf(A, s), "zipf_A" + parts[1] + "_s" + parts[2]});
        } else if (kind == "uniform") {
            if (parts.size() != 2) throw std::runtime_error("config: uniform needs uniform:A");
            const auto A = static_cast<std::size_t>(std::stoull(parts[1]));
            out.push_back({uniform(A), "uniform_A" + parts[1]});
        } else if (kind == "csv" || kind == "counts-csv" || kind == "corpus") {
            if (parts.size() != 2) throw std::runtime_error("config: " + kind + " needs " + kind + ":path");
            std::filesystem::path p(parts[1]);
            if (p.is_relative()) {
                // resolve against the config directory, then its parent (the
                // usual repo layout keeps configs/ and data/ side by side)
                const auto near = base_dir / p;
                p = std::filesystem::exists(near) ? near : base_dir.parent_path() / p;
            }
            FrequencyTable t;
            if (kind == "corpus") {
                t = tokenize_corpus(p);
            } else {
                t = load_frequency_csv(p, kind == "csv" ? FreqMode::Proportions : FreqMode::Counts);
            }
            out.push_back({to_distribution(t), p.stem().string()});
        } else {
            throw std::runtime_error("config: unknown distribution kind '" + kind + "'");
        }
    }
    return out;
}

inline std::vector<BoundSpec> parse_methods(const KvConfig& cfg, double delta) {
    std::optional<int> m;
    const std::string m_str = cfg.get_or("m", "auto");
    if (m_str != "auto") {
        const int v = std::stoi(m_str);
        if (v < 2 || v % 2 != 0) throw std::runtime_error("config: m must be 'auto' or an even integer >= 2");
        m = v;
    }
    std::vector<BoundSpec> specs;
    for (const std::string& tok : cfg.get_list("methods")) {
        const auto method = parse_method(tok);
        if (!method) throw std::runtime_error("config: unknown method '" + tok + "'");
        BoundSpec spec;
        spec.method = *method;
        spec.delta = delta;
        if (uses_moment_order(*method)) spec.m = m;
        specs.push_back(spec);
    }
    return specs;
}

// One ExperimentConfig per configured distribution.
inline std::vector<ExperimentConfig> experiments_from_config(
    const KvConfig& cfg, const std::filesystem::path& base_dir,
    std::optional<std::uint64_t> seed_override = std::nullopt,
    std::optional<unsigned> threads_override = std::nullopt) {
    const std::string delta_str = cfg.get_or("delta", "0.05");
    DeltaRule rule = DeltaRule::Fixed;
    double delta = 0.05;
    if (delta_str == "1/n^2" || delta_str == "inverse_n_squared") {
        rule = DeltaRule::InverseNSquared;
        delta = 0.05;  // placeholder; per-cell value comes from the rule
    } else {
        delta = std::stod(delta_str);
    }

    std::vector<ExperimentConfig> out;
    for (auto& ds : parse_distributions(cfg, base_dir)) {
        ExperimentConfig ec{std::move(ds.dist)};
        ec.label = cfg.get_or("label_prefix", "") + ds.label;
        ec.n_values = cfg.get_u64_list("n_values");
        ec.delta_rule = rule;
        ec.delta = delta;
        ec.methods = parse_methods(cfg, delta);
        ec.reps = cfg.get_u64_or("reps", 10000);
        ec.seed = seed_override ? *seed_override : cfg.get_u64_or("seed", 0);
        if (cfg.has("k")) ec.k = static_cast<std::size_t>(cfg.get_u64("k"));
        ec.threads = threads_override ? *threads_override
                                      : static_cast<unsigned>(cfg.get_u64_or("threads", 0));
        ec.validate();
        out.push_back(std::move(ec));
    }
    return out;
}

// Radius-versus-n plot in the style of the coverage figures: one curve per
// method plus the simulated oracle quantile.
inline std::string report_plot_svg(const CoverageReport& rep) {
    std::vector<PlotSeries> series;
    std::map<std::string, PlotSeries> by_method;
    std::vector<std::string> order;
    for (const auto& c : rep.cells) {
        if (c.skipped || std::isnan(c.mean_radius)) continue;
        auto [it, inserted] = by_method.try_emplace(c.method);
        if (inserted) {
            it->second.name = c.method;
            order.push_back(c.method);
        }
        it->second.points.emplace_back(static_cast<double>(c.n), c.mean_radius);
    }
    PlotSeries oracle;
    oracle.name = "oracle quantile";
    oracle.dashed = true;
    std::map<std::uint64_t, double> oq;
    for (const auto& c : rep.cells) {
        if (!c.skipped) oq[c.n] = c.oracle_quantile;
    }
    for (const auto& [n, q] : oq) oracle.points.emplace_back(static_cast<double>(n), q);
    for (const auto& name : order) series.push_back(by_method[name]);
    series.push_back(std::move(oracle));
    if (!rep.refs.empty()) {  // selective mode: reference lines for the top symbols
        PlotSeries lb, top1;
        lb.name = "selective lower bound";
        lb.dashed = true;
        top1.name = "oracle top-1 quantile";
        top1.dashed = true;
        for (const auto& r : rep.refs) {
            lb.points.emplace_back(static_cast<double>(r.n), r.selective_lower_bound);
            top1.points.emplace_back(static_cast<double>(r.n), r.oracle_top1_quantile);
        }
        series.push_back(std::move(top1));
        series.push_back(std::move(lb));
    }
    return line_plot_svg("mean bound radius vs n (" + rep.label + ")", "n", "radius", series);
}

struct WrittenArtifacts {
    std::vector<std::filesystem::path> files;
};

// Writes report CSV/JSON/SVG stamped with the config hash; returns the paths.
inline WrittenArtifacts write_report_artifacts(const CoverageReport& rep,
                                               const std::filesystem::path& out_dir,
                                               std::uint64_t config_hash,
                                               const std::string& config_echo = "") {
    std::filesystem::create_directories(out_dir);
    WrittenArtifacts w;
    const std::string stem = rep.label + "_" + hex16(config_hash);
    const auto csv_path = out_dir / (stem + ".csv");
    write_text_file(csv_path, to_csv(rep));
    w.files.push_back(csv_path);
    const auto json_path = out_dir / (stem + ".json");
    write_text_file(json_path, to_json(rep, config_echo).dump(2) + "\n");
    w.files.push_back(json_path);
    const auto svg_path = out_dir / (stem + ".svg");
    write_text_file(svg_path, report_plot_svg(rep));
    w.files.push_back(svg_path);
    return w;
}

// Run manifest: config echo, version, seed, timestamps, and the artifact
// list. Written last so its presence marks a complete run.
inline std::filesystem::path write_manifest(const std::filesystem::path& out_dir,
                                            const KvConfig& cfg, std::uint64_t config_hash,
                                            std::uint64_t seed,
                                            const std::vector<std::filesystem::path>& files,
                                            const std::string& command) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["command"] = command;
    j["seed"] = seed;
    j["config_hash"] = hex16(config_hash);
    j["config"] = cfg.canonical();
    const auto now = std::chrono::system_clock::now();
    j["completed_unix_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : files) arr.push_back(f.filename().string());
    j["artifacts"] = arr;
    const auto path = out_dir / ("manifest_" + hex16(config_hash) + ".json");
    write_text_file(path, j.dump(2) + "\n");
    return path;
}

}  // namespace linf
