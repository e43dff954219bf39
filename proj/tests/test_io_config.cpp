#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>

#include "linf/config.hpp"
#include "linf/experiment.hpp"
#include "linf/io.hpp"
#include "linf/svg.hpp"

using namespace linf;
using Catch::Matchers::WithinRel;

TEST_CASE("kv config parsing") {
    const auto cfg = KvConfig::parse_string(
        "# experiment\n"
        "label_prefix = demo_   # trailing comment\n"
        "n_values = 100, 1000\n"
        "reps=250\n"
        "\n"
        "delta = 0.05\n");
    CHECK(cfg.get("label_prefix") == "demo_");
    CHECK(cfg.get_u64("reps") == 250);
    CHECK(cfg.get_u64_list("n_values") == std::vector<std::uint64_t>{100, 1000});
    CHECK_THROWS_WITH(cfg.get("missing"), Catch::Matchers::ContainsSubstring("missing"));
    CHECK_THROWS_AS(KvConfig::parse_string("just a line\n"), std::runtime_error);

    // canonical form is sorted and stable
    const auto again = KvConfig::parse_string("delta = 0.05\nreps=250\nn_values = 100, 1000\nlabel_prefix = demo_\n");
    CHECK(cfg.canonical() == again.canonical());
}

TEST_CASE("experiments from config") {
    const auto cfg = KvConfig::parse_string(
        "distributions = zipf:100:1.1, uniform:100\n"
        "n_values = 100, 1000\n"
        "delta = 0.05\n"
        "methods = baseline, th2, th4\n"
        "m = 8\n"
        "reps = 50\n"
        "seed = 7\n");
    const auto exps = experiments_from_config(cfg, ".");
    REQUIRE(exps.size() == 2);
    CHECK(exps[0].label == "zipf_A100_s1.1");
    CHECK(exps[1].label == "uniform_A100");
    CHECK(exps[0].methods.size() == 3);
    CHECK(exps[0].methods[1].m == 8);
    CHECK_FALSE(exps[0].methods[0].m.has_value());  // baseline takes no moment order
    CHECK(exps[0].delta_rule == DeltaRule::Fixed);

    const auto decay = KvConfig::parse_string(
        "distributions = uniform:10\n"
        "n_values = 100\n"
        "delta = 1/n^2\n"
        "methods = th2\n"
        "reps = 10\n");
    const auto e2 = experiments_from_config(decay, ".");
    CHECK(e2[0].delta_rule == DeltaRule::InverseNSquared);
    CHECK(e2[0].delta_for(100) == 1e-4);

    CHECK_THROWS_WITH(experiments_from_config(KvConfig::parse_string(
                          "distributions = uniform:10\nn_values = 10\nmethods = nope\nreps=1\n"), "."),
                      Catch::Matchers::ContainsSubstring("nope"));
}

TEST_CASE("fmt_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, 0.0213, 1e-17, 123456789.123456789}) {
        CHECK(std::strtod(fmt_double(v).c_str(), nullptr) == v);
    }
    CHECK(fmt_double(std::nan("")) == "nan");
}

TEST_CASE("fnv1a64 is the reference function") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("abc") == 0xe71fa2190541574bULL);
}

TEST_CASE("bound result json") {
    BoundResult r;
    r.method = Method::Th2;
    r.radius = 0.025;
    r.m_used = 6;
    r.failure_prob = 0.05;
    r.components["epsilon"] = 1.5;
    const auto j = to_json(r);
    CHECK(j["method"] == "th2");
    CHECK(j["radius"] == 0.025);
    CHECK(j["m_used"] == 6);
    CHECK(j["components"]["epsilon"] == 1.5);
    CHECK(j["vacuous"] == false);
}

TEST_CASE("coverage report serialization") {
    CoverageReport rep;
    rep.label = "demo";
    rep.seed = 1;
    rep.reps = 10;
    CellResult a;
    a.method = "baseline";
    a.n = 100;
    a.delta = 0.05;
    a.coverage_rate = 1.0;
    a.covered = 10;
    a.mean_radius = 0.2;
    a.oracle_quantile = 0.1;
    a.reps = 10;
    rep.cells.push_back(a);
    CellResult b = a;
    b.method = "th4";
    b.skipped = true;
    b.note = "skipped: requires n >= 81";
    rep.cells.push_back(b);

    const auto csv = to_csv(rep);
    CHECK(csv.find("label,method,n,delta,") == 0);
    CHECK(csv.find("demo,baseline,100,") != std::string::npos);
    CHECK(csv.find("skipped: requires n >= 81") != std::string::npos);

    const auto j = to_json(rep);
    CHECK(j["cells"].size() == 2);
    CHECK(j["cells"][1]["skipped"] == true);
}

TEST_CASE("svg output is deterministic and timestamp free") {
    std::vector<PlotSeries> s(1);
    s[0].name = "demo";
    s[0].points = {{100.0, 0.2}, {1000.0, 0.05}, {10000.0, 0.01}};
    const auto one = line_plot_svg("t", "n", "radius", s);
    const auto two = line_plot_svg("t", "n", "radius", s);
    CHECK(one == two);
    CHECK(one.find("polyline") != std::string::npos);
    CHECK(one.find("202") == std::string::npos);  // no dates of any kind
}

TEST_CASE("artifact writing stamps the config hash") {
    CoverageReport rep;
    rep.label = "demo";
    rep.seed = 1;
    rep.reps = 2;
    CellResult a;
    a.method = "baseline";
    a.n = 100;
    a.delta = 0.05;
    a.coverage_rate = 1.0;
    a.covered = 2;
    a.mean_radius = 0.2;
    a.oracle_quantile = 0.1;
    a.reps = 2;
    rep.cells.push_back(a);

    const auto dir = std::filesystem::temp_directory_path() / "linf_artifacts";
    std::filesystem::remove_all(dir);
    const auto w = write_report_artifacts(rep, dir, 0xabcdef0123456789ULL);
    REQUIRE(w.files.size() == 3);
    for (const auto& f : w.files) {
        CHECK(std::filesystem::exists(f));
        CHECK(f.filename().string().find("abcdef0123456789") != std::string::npos);
    }

    const auto cfg = KvConfig::parse_string("reps = 2\n");
    const auto manifest = write_manifest(dir, cfg, 0xabcdef0123456789ULL, 1, w.files, "coverage");
    CHECK(std::filesystem::exists(manifest));
}
