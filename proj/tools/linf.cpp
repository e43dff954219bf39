// linf: simultaneous sup-norm confidence bounds for discrete distributions.
//
// Subcommands
//   bounds         evaluate the bound family on a counts file
//   coverage       seeded Monte Carlo coverage sweep from a config file
//   topk           selective (k most frequent symbols) coverage sweep
//   binom-ci       exact and approximate binomial intervals for one outcome
//   verify-theory  numeric checks of the analytic side constants
//   ingest         build an empirical distribution from a CSV or raw text
//
// Exit codes: 0 success (skipped cells included), 2 validation/precondition
// failure, 1 I/O or internal failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "linf/bounds.hpp"
#include "linf/config.hpp"
#include "linf/distribution.hpp"
#include "linf/experiment.hpp"
#include "linf/ingest.hpp"
#include "linf/io.hpp"
#include "linf/montecarlo.hpp"
#include "linf/svg.hpp"
#include "linf/theory.hpp"
#include "linf/version.hpp"

namespace {

using nlohmann::json;

struct GlobalOpts {
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    unsigned threads = 0;
    std::string format = "json";
};

// expanded=true marks methods pulled in by the 'all' shorthand; those may
// skip on unmet preconditions instead of failing the whole invocation
std::vector<std::pair<linf::Method, bool>> resolve_methods(const std::vector<std::string>& tokens) {
    std::vector<std::pair<linf::Method, bool>> methods;
    for (const auto& t : tokens) {
        if (t == "all") {
            for (linf::Method m :
                 {linf::Method::Baseline, linf::Method::Th1Oracle, linf::Method::Th1WorstCase,
                  linf::Method::Th2, linf::Method::Cor21, linf::Method::Th3Ub1,
                  linf::Method::Th3Ub2, linf::Method::Th3Ub3, linf::Method::Th4}) {
                methods.emplace_back(m, true);
            }
            continue;
        }
        const auto m = linf::parse_method(t);
        if (!m) throw std::invalid_argument("unknown method '" + t + "'");
        methods.emplace_back(*m, false);
    }
    if (methods.empty()) throw std::invalid_argument("no methods requested");
    return methods;
}

int cmd_bounds(const GlobalOpts& g, const std::string& counts_path, double delta,
               const std::vector<std::string>& method_tokens, const std::string& m_str,
               std::optional<double> delta1, std::optional<double> delta2) {
    const auto counts = linf::load_counts_csv(counts_path);
    const auto est = linf::mle(counts);
    // oracle-form bounds are evaluated at the empirical distribution when
    // driven from a counts file (plug-in diagnostic usage)
    const linf::Distribution plug_in(est.probs);

    std::optional<int> m;
    if (m_str != "auto") m = std::stoi(m_str);

    json rows = json::array();
    std::ostringstream csv;
    csv << "method,radius,m_used,failure_prob,vacuous,note\n";
    for (const auto& [method, expanded] : resolve_methods(method_tokens)) {
        linf::BoundSpec spec;
        spec.method = method;
        spec.delta = delta;
        spec.delta1 = delta1;
        spec.delta2 = delta2;
        if (linf::uses_moment_order(method)) spec.m = m;
        linf::BoundInput in;
        in.truth = &plug_in;
        in.estimate = &est;
        in.n = counts.n;
        try {
            const auto res = linf::evaluate_bound(spec, in);
            rows.push_back(linf::to_json(res));
            csv << linf::method_token(res.method) << ',' << linf::fmt_double(res.radius) << ','
                << (res.m_used ? std::to_string(*res.m_used) : "") << ','
                << linf::fmt_double(res.failure_prob) << ',' << (res.vacuous ? 1 : 0) << ",\n";
        } catch (const std::exception& e) {
            if (!expanded) throw;  // explicitly requested: surface the precondition
            json j;
            j["method"] = linf::method_token(method);
            j["skipped"] = e.what();
            rows.push_back(std::move(j));
            csv << linf::method_token(method) << ",nan,,nan,," << e.what() << '\n';
        }
    }
    if (g.format == "csv") {
        std::cout << csv.str();
    } else {
        std::cout << rows.dump(2) << '\n';
    }
    return 0;
}

int run_config_experiments(const GlobalOpts& g, const std::string& config_path, bool topk,
                           const std::string& command) {
    const auto cfg = linf::KvConfig::parse_file(config_path);
    const auto hash = linf::fnv1a64(cfg.canonical());
    auto exps = linf::experiments_from_config(
        cfg, std::filesystem::absolute(config_path).parent_path(), g.seed,
        g.threads == 0 ? std::nullopt : std::optional<unsigned>(g.threads));

    const std::filesystem::path out_dir = g.out_dir.empty() ? "linf-out" : g.out_dir;
    std::vector<std::filesystem::path> files;
    std::uint64_t seed_used = 0;
    for (auto& ec : exps) {
        if (topk && !ec.k) throw std::invalid_argument("topk: config must set k");
        if (!topk) ec.k.reset();
        seed_used = ec.seed;
        const auto report = linf::run_experiment(ec);
        const auto written = linf::write_report_artifacts(report, out_dir, hash, cfg.canonical());
        files.insert(files.end(), written.files.begin(), written.files.end());
        for (const auto& cell : report.cells) {
            std::cout << report.label << " method=" << cell.method << " n=" << cell.n;
            if (cell.skipped) {
                std::cout << " " << cell.note << '\n';
            } else {
                std::cout << " coverage=" << cell.coverage_rate
                          << " mean_radius=" << linf::fmt_double(cell.mean_radius) << '\n';
            }
        }
    }
    const auto manifest = linf::write_manifest(out_dir, cfg, hash, seed_used, files, command);
    std::cout << "manifest: " << manifest.string() << '\n';
    return 0;
}

int cmd_binom_ci(const GlobalOpts&, std::int64_t y, std::int64_t n, double delta) {
    json out;
    out["y"] = y;
    out["n"] = n;
    out["delta"] = delta;
    const auto cp = linf::clopper_pearson(y, n, delta);
    out["clopper_pearson"] = {{"lower", cp.lower}, {"upper", cp.upper}};
    if (y >= 1 && y <= n - 1) {
        const auto th = linf::thulin_endpoints(y, n, delta);
        out["thulin"] = {{"lower", th.lower}, {"upper", th.upper}};
    } else {
        out["thulin"] = nullptr;  // stated only for interior outcomes
    }
    const double theta_hat = static_cast<double>(y) / static_cast<double>(n);
    const double radius = linf::empirical_bernstein(theta_hat, static_cast<std::uint64_t>(n), delta);
    out["empirical_bernstein"] = {{"radius", radius},
                                  {"lower", std::max(0.0, theta_hat - radius)},
                                  {"upper", std::min(1.0, theta_hat + radius)}};
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_verify_theory(const GlobalOpts& g) {
    json checks = json::array();
    bool all = true;
    auto push = [&](const std::string& name, bool pass, json data) {
        data["name"] = name;
        data["pass"] = pass;
        checks.push_back(data);
        all = all && pass;
        std::printf("[%s] %s\n", pass ? "PASS" : "FAIL", name.c_str());
    };

    {  // failure-probability envelope f(n)
        std::uint64_t argmax = 10;
        double fmax = 0.0;
        bool bounded = true;
        for (std::uint64_t n = 10; n <= 200; ++n) {
            const double f = linf::f_of_n(n);
            if (f > fmax) {
                fmax = f;
                argmax = n;
            }
            bounded = bounded && f <= 40.5;
        }
        bool decreasing = true;
        double prev = linf::f_of_n(201);
        for (std::uint64_t n = 202; n <= 100000 && decreasing; ++n) {
            const double f = linf::f_of_n(n);
            decreasing = f < prev;
            prev = f;
        }
        push("f(n) <= 81/2 on {10..200}", bounded,
             {{"max", fmax}, {"argmax", argmax}, {"f32", linf::f_of_n(32)}, {"f33", linf::f_of_n(33)}});
        push("f(n) strictly decreasing on {201..1e5}", decreasing, {});
        bool light_ok = true;
        for (std::uint64_t n = 10; n <= 100000; n = n < 100 ? n + 1 : n * 10) {
            light_ok = light_ok && linf::light_mass_failure_prob(n) <= 81.0 / static_cast<double>(n);
        }
        push("light-mass failure probability <= 81/n", light_ok, {});
    }

    {  // kl ratio climb along the two-point construction
        json vals = json::object();
        double prev = 0.0;
        bool monotone = true, below_half = true;
        for (std::uint64_t n : {10000ULL, 100000ULL, 1000000ULL, 10000000ULL}) {
            const auto fp = linf::fano_pair(n);
            const double r = static_cast<double>(n) / std::log(static_cast<double>(n)) *
                             linf::kl(fp.p, fp.q);
            vals[std::to_string(n)] = r;
            monotone = monotone && r > prev;
            below_half = below_half && r < 0.5;
            prev = r;
        }
        push("kl ratio climbs monotonically toward 1/2", monotone && below_half,
             {{"values", vals}, {"limit", 0.5}});

        bool sep = true;
        for (std::uint64_t n : {10000ULL, 100000ULL}) {
            const auto fp = linf::fano_pair(n);
            const double nn = static_cast<double>(n);
            sep = sep && linf::sup_dev(fp.p, fp.q) >=
                             0.25 * std::log(nn) / (nn * std::log(std::log(nn)));
        }
        push("sup-norm separation at c = 0.25", sep, {});
    }

    {  // argmax-variance property and the variance functional envelopes
        linf::Rng rng(g.seed.value_or(20240607));
        bool argmax_ok = true, envelope_ok = true;
        for (int t = 0; t < 2000; ++t) {
            const std::size_t A = 2 + static_cast<std::size_t>(rng.next_u64() % 40);
            std::vector<double> w(A);
            linf::CompensatedSum total;
            for (auto& x : w) {
                x = -std::log(1.0 - rng.next_unit());
                total.add(x);
            }
            for (auto& x : w) x /= total.value();
            linf::CompensatedSum c2;
            for (double x : w) c2.add(x);
            w[0] += 1.0 - c2.value();
            const linf::Distribution d(std::move(w));
            argmax_ok = argmax_ok && linf::argmax_variance_check(d);
            const double vs = linf::v_star(d);
            const double Vs = linf::V_star(d);
            envelope_ok = envelope_ok && Vs <= linf::phi(vs) + 1e-12 &&
                          Vs <= vs * std::log(static_cast<double>(A) + 1.0) + 1e-12;
        }
        push("largest mass maximizes p(1-p)", argmax_ok, {});
        push("V* <= phi(v*) and V* <= v* ln(A+1)", envelope_ok, {});
    }

    json out;
    out["version"] = linf::kVersion;
    out["all_passed"] = all;
    out["checks"] = checks;
    if (!g.out_dir.empty()) {
        std::filesystem::create_directories(g.out_dir);
        const auto path = std::filesystem::path(g.out_dir) / "theory_report.json";
        linf::write_text_file(path, out.dump(2) + "\n");
        std::cout << "report: " << path.string() << '\n';
    } else {
        std::cout << out.dump(2) << '\n';
    }
    return all ? 0 : 1;
}

int cmd_ingest(const GlobalOpts& g, const std::string& path, const std::string& mode) {
    linf::FrequencyTable table;
    if (mode == "corpus") {
        table = linf::tokenize_corpus(path);
    } else if (mode == "counts") {
        table = linf::load_frequency_csv(path, linf::FreqMode::Counts);
    } else if (mode == "proportions") {
        table = linf::load_frequency_csv(path, linf::FreqMode::Proportions);
    } else {
        throw std::invalid_argument("mode must be counts, proportions, or corpus");
    }
    const auto dist = linf::to_distribution(table);
    json out = linf::to_json(table);
    out["support_size"] = dist.support_size();
    out["top_mass"] = dist.top_mass();
    if (!g.out_dir.empty()) {
        std::filesystem::create_directories(g.out_dir);
        const auto stem = std::filesystem::path(path).stem().string();
        const auto dist_path = std::filesystem::path(g.out_dir) / (stem + "_distribution.csv");
        linf::save_distribution_csv(dist_path, dist);
        out["distribution_csv"] = dist_path.string();
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simultaneous sup-norm confidence bounds for discrete distributions"};
    app.set_version_flag("--version", linf::kVersion);
    app.require_subcommand(1);

    GlobalOpts g;
    std::uint64_t seed_raw = 0;
    auto* seed_opt = app.add_option("--seed", seed_raw, "master seed override")->envname("LINF_SEED");
    app.add_option("--out", g.out_dir, "output directory")->envname("LINF_OUT");
    app.add_option("--threads", g.threads, "worker threads (0 = hardware)")->envname("LINF_THREADS");
    app.add_option("--format", g.format, "stdout format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->envname("LINF_FORMAT");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "evaluate bounds on a counts file");
    std::string counts_path;
    double delta = 0.05;
    std::vector<std::string> method_tokens{"all"};
    std::string m_str = "auto";
    double d1 = 0.0, d2 = 0.0;
    bounds->add_option("--counts", counts_path, "two-column counts CSV")->required();
    bounds->add_option("--delta", delta, "total failure probability")->required();
    bounds->add_option("--methods", method_tokens, "method tokens or 'all'")->delimiter(',');
    bounds->add_option("--m", m_str, "even moment order or 'auto'");
    auto* d1o = bounds->add_option("--delta1", d1, "explicit first-stage budget");
    auto* d2o = bounds->add_option("--delta2", d2, "explicit second-stage budget");

    // coverage / topk
    auto* coverage = app.add_subcommand("coverage", "Monte Carlo coverage sweep");
    std::string coverage_cfg;
    coverage->add_option("config", coverage_cfg, "experiment config file")->required();
    auto* topk = app.add_subcommand("topk", "top-k selective coverage sweep");
    std::string topk_cfg;
    topk->add_option("config", topk_cfg, "experiment config file")->required();

    // binom-ci
    auto* binom = app.add_subcommand("binom-ci", "binomial intervals for one outcome");
    std::int64_t y = 0, n = 0;
    double bdelta = 0.05;
    binom->add_option("y", y, "observed count")->required();
    binom->add_option("n", n, "trials")->required();
    binom->add_option("--delta", bdelta, "total failure probability");

    // verify-theory
    auto* verify = app.add_subcommand("verify-theory", "numeric checks of analytic constants");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "build an empirical distribution");
    std::string ingest_path, ingest_mode = "counts";
    ingest->add_option("path", ingest_path, "CSV or text file")->required();
    ingest->add_option("--mode", ingest_mode, "counts | proportions | corpus")
        ->check(CLI::IsMember({"counts", "proportions", "corpus"}));

    // global flags remain usable after the subcommand name
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) g.seed = seed_raw;

    try {
        if (*bounds) {
            return cmd_bounds(g, counts_path, delta, method_tokens, m_str,
                              *d1o ? std::optional<double>(d1) : std::nullopt,
                              *d2o ? std::optional<double>(d2) : std::nullopt);
        }
        if (*coverage) return run_config_experiments(g, coverage_cfg, false, "coverage");
        if (*topk) return run_config_experiments(g, topk_cfg, true, "topk");
        if (*binom) return cmd_binom_ci(g, y, n, bdelta);
        if (*verify) return cmd_verify_theory(g);
        if (*ingest) return cmd_ingest(g, ingest_path, ingest_mode);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
