#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "linf/ingest.hpp"
#include "linf/io.hpp"

using namespace linf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    return path;
}

}  // namespace

TEST_CASE("counts csv") {
    const auto p = write_temp("linf_counts.csv", "label,count\na,3\nb,1\n");
    const auto t = load_frequency_csv(p, FreqMode::Counts);
    REQUIRE(t.entries.size() == 2);
    CHECK(t.total == 4.0);
    const auto d = to_distribution(t);
    CHECK(d[0] == 0.75);
    CHECK(d[1] == 0.25);
}

TEST_CASE("proportions: residual bucket vs renormalization") {
    const auto low = write_temp("linf_low.csv", "label,share\na,0.6\nb,0.3\n");
    const auto t1 = load_frequency_csv(low, FreqMode::Proportions);
    REQUIRE(t1.entries.size() == 3);
    CHECK(t1.entries.back().label == "OTHER");
    CHECK_THAT(t1.entries.back().value, WithinAbs(0.1, 1e-12));
    CHECK_THAT(t1.total, WithinAbs(1.0, 1e-12));

    const auto close_path = write_temp("linf_close.csv", "label,share\na,0.594\nb,0.396\n");
    const auto t2 = load_frequency_csv(close_path, FreqMode::Proportions);
    REQUIRE(t2.entries.size() == 2);  // renormalized silently, no bucket
    CHECK_THAT(t2.entries[0].value + t2.entries[1].value, WithinAbs(1.0, 1e-12));

    const auto high = write_temp("linf_high.csv", "label,share\na,0.7\nb,0.4\n");
    CHECK_THROWS_WITH(load_frequency_csv(high, FreqMode::Proportions),
                      Catch::Matchers::ContainsSubstring("1.02"));
}

TEST_CASE("csv validation errors") {
    const auto dup = write_temp("linf_dup.csv", "label,count\na,3\na,1\n");
    CHECK_THROWS_WITH(load_frequency_csv(dup, FreqMode::Counts),
                      Catch::Matchers::ContainsSubstring("'a'"));

    const auto bad = write_temp("linf_bad.csv", "label,count\na,3\nb,xyz\n");
    CHECK_THROWS_WITH(load_frequency_csv(bad, FreqMode::Counts),
                      Catch::Matchers::ContainsSubstring("line 3"));

    const auto empty = write_temp("linf_empty.csv", "label,count\n");
    CHECK_THROWS_AS(load_frequency_csv(empty, FreqMode::Counts), std::runtime_error);
}

TEST_CASE("tokenizer") {
    const auto p1 = write_temp("linf_tok1.txt", "To be, to be.");
    const auto t1 = tokenize_corpus(p1);
    REQUIRE(t1.entries.size() == 2);
    CHECK(t1.entries[0].label == "to");
    CHECK(t1.entries[0].value == 2.0);
    CHECK(t1.entries[1].label == "be");
    CHECK(t1.entries[1].value == 2.0);

    const auto p2 = write_temp("linf_tok2.txt", "don't Don't");
    const auto t2 = tokenize_corpus(p2);
    REQUIRE(t2.entries.size() == 1);
    CHECK(t2.entries[0].label == "don't");
    CHECK(t2.entries[0].value == 2.0);
}

TEST_CASE("tokenizer idempotence on its own vocabulary") {
    const auto p = write_temp("linf_tok3.txt", "The cat; the CAT's 2nd hat!\nhat hat?");
    const auto t = tokenize_corpus(p);
    std::string joined;
    for (const auto& e : t.entries) joined += e.label + " ";
    const auto p2 = write_temp("linf_tok4.txt", joined);
    const auto t2 = tokenize_corpus(p2);
    REQUIRE(t2.entries.size() == t.entries.size());
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
        CHECK(t2.entries[i].label == t.entries[i].label);
        CHECK(t2.entries[i].value == 1.0);
    }
}

TEST_CASE("distribution csv round trip") {
    const auto table = load_frequency_csv(
        write_temp("linf_rt.csv", "label,count\nx,5\ny,2\nz,3\n"), FreqMode::Counts);
    const auto dist = to_distribution(table);
    const auto out = std::filesystem::temp_directory_path() / "linf_rt_dist.csv";
    save_distribution_csv(out, dist);
    const auto back = load_distribution_csv(out);
    REQUIRE(back.support_size() == dist.support_size());
    for (std::size_t i = 0; i < dist.support_size(); ++i) CHECK(back[i] == dist[i]);
}

TEST_CASE("counts csv round trip is bit exact") {
    const CountVector cv({7, 0, 12, 1});
    const auto out = std::filesystem::temp_directory_path() / "linf_rt_counts.csv";
    save_counts_csv(out, cv);
    const auto back = load_counts_csv(out);
    CHECK(back.counts == cv.counts);
    CHECK(back.n == cv.n);
}

TEST_CASE("census fixture loads and has the reported head") {
    const auto t = load_frequency_csv(std::filesystem::path(LINF_DATA_DIR) /
                                          "census_top1000_synthetic.csv",
                                      FreqMode::Counts);
    REQUIRE(t.entries.size() == 1000);
    const auto d = to_distribution(t);
    CHECK_THAT(d[0], WithinRel(0.0213, 1e-12));
    CHECK_THAT(d[4], WithinRel(0.0130, 1e-12));
    CHECK(d.top_mass() == d[0]);
    // head masses really are the top of the distribution
    for (std::size_t i = 5; i < d.support_size(); ++i) CHECK(d[i] <= d[4]);
}
