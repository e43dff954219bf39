#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "linf/distribution.hpp"
#include "linf/numeric.hpp"

// Builders for empirical distributions from frequency tables and raw text.

namespace linf {

enum class FreqMode { Counts, Proportions };

struct FreqEntry {
    std::string label;
    double value = 0.0;  // count or proportion
};

struct FrequencyTable {
    std::vector<FreqEntry> entries;
    double total = 0.0;
};

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_value(const std::string& field, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(field, &pos);
        if (pos != field.size()) throw std::invalid_argument("trailing characters");
        if (!(v >= 0.0)) throw std::invalid_argument("negative");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("frequency csv: malformed value '" + field + "' at line " +
                                 std::to_string(line_no));
    }
}

}  // namespace detail

// Two-column CSV (label,value) with a mandatory header row. Labels must be
// unique. In Proportions mode the column must sum to at most 1.02; sums in
// [0.98, 1.02] are silently renormalized, smaller sums get an explicit
// residual "OTHER" bucket (frequency tables often cover only the head of the
// distribution).
inline FrequencyTable load_frequency_csv(const std::filesystem::path& path, FreqMode mode) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("frequency csv: cannot open " + path.string());
    FrequencyTable table;
    std::unordered_map<std::string, std::size_t> seen;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::strip(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("frequency csv: expected two comma-separated columns at line " +
                                     std::to_string(line_no));
        }
        if (!header_seen) {  // header row is required and skipped
            header_seen = true;
            continue;
        }
        FreqEntry e;
        e.label = detail::strip(line.substr(0, comma));
        if (e.label.empty()) {
            throw std::runtime_error("frequency csv: empty label at line " + std::to_string(line_no));
        }
        e.value = detail::parse_value(detail::strip(line.substr(comma + 1)), line_no);
        if (!seen.emplace(e.label, line_no).second) {
            throw std::runtime_error("frequency csv: duplicate label '" + e.label + "' at line " +
                                     std::to_string(line_no));
        }
        table.entries.push_back(std::move(e));
    }
    if (!header_seen) throw std::runtime_error("frequency csv: missing header row in " + path.string());
    if (table.entries.empty()) throw std::runtime_error("frequency csv: no data rows in " + path.string());

    CompensatedSum sum;
    for (const auto& e : table.entries) sum.add(e.value);
    const double s = sum.value();
    if (mode == FreqMode::Counts) {
        if (s <= 0.0) throw std::runtime_error("frequency csv: counts sum to zero");
        table.total = s;
        return table;
    }
    if (s > 1.02) {
        throw std::runtime_error("frequency csv: proportions sum to " + std::to_string(s) +
                                 " (> 1.02)");
    }
    if (s <= 0.0) throw std::runtime_error("frequency csv: proportions sum to zero");
    if (s >= 0.98) {
        for (auto& e : table.entries) e.value /= s;
    } else {
        if (seen.find("OTHER") != seen.end()) {
            throw std::runtime_error("frequency csv: residual bucket clashes with existing label 'OTHER'");
        }
        table.entries.push_back({"OTHER", 1.0 - s});
    }
    table.total = 1.0;
    return table;
}

// Lowercases (ASCII) and splits on any run of characters outside
// [a-z0-9']; empty tokens are dropped. The tokenizer is intentionally
// simple and fully specified so that corpus-driven experiments reproduce.
inline FrequencyTable tokenize_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("tokenize: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    std::unordered_map<std::string, std::uint64_t> counts;
    std::vector<std::string> order;
    std::string token;
    auto flush = [&]() {
        if (token.empty()) return;
        auto [it, inserted] = counts.emplace(token, 0);
        if (inserted) order.push_back(token);
        ++it->second;
        token.clear();
    };
    for (char raw : text) {
        const auto c = static_cast<unsigned char>(raw);
        if (std::isalnum(c) || c == '\'') {
            token.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();

    FrequencyTable table;
    CompensatedSum sum;
    table.entries.reserve(order.size());
    for (const auto& w : order) {  // first-appearance order keeps output deterministic
        const double v = static_cast<double>(counts[w]);
        table.entries.push_back({w, v});
        sum.add(v);
    }
    table.total = sum.value();
    if (table.entries.empty()) throw std::runtime_error("tokenize: no tokens in " + path.string());
    return table;
}

inline Distribution to_distribution(const FrequencyTable& table) {
    if (!(table.total > 0.0)) throw std::invalid_argument("to_distribution: total must be positive");
    std::vector<double> probs;
    probs.reserve(table.entries.size());
    for (const auto& e : table.entries) probs.push_back(e.value / table.total);
    CompensatedSum s;
    for (double x : probs) s.add(x);
    probs[0] += 1.0 - s.value();
    return Distribution(std::move(probs));
}

}  // namespace linf
