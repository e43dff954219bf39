#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Flat experiment-config grammar:
//   key = value          one pair per line
//   # comment            full-line or trailing
//   a, b, c              list values are comma-separated
// No sections, no nesting.

namespace linf {

class KvConfig {
 public:
    static KvConfig parse_string(const std::string& text) {
        KvConfig cfg;
        std::istringstream in(text);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string stripped = trim(line);
            if (stripped.empty()) continue;
            const auto eq = stripped.find('=');
            if (eq == std::string::npos) {
                throw std::runtime_error("config: expected 'key = value' at line " +
                                         std::to_string(line_no));
            }
            const std::string key = trim(stripped.substr(0, eq));
            const std::string value = trim(stripped.substr(eq + 1));
            if (key.empty()) {
                throw std::runtime_error("config: empty key at line " + std::to_string(line_no));
            }
            cfg.kv_[key] = value;
        }
        return cfg;
    }

    static KvConfig parse_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("config: cannot open " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_string(buf.str());
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw std::runtime_error("config: missing key '" + key + "'");
        return it->second;
    }

    std::string get_or(const std::string& key, const std::string& fallback) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }

    std::uint64_t get_u64(const std::string& key) const { return parse_u64(get(key), key); }
    std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const {
        return has(key) ? get_u64(key) : fallback;
    }

    double get_double(const std::string& key) const { return parse_double(get(key), key); }

    std::vector<std::string> get_list(const std::string& key) const {
        std::vector<std::string> out;
        std::string cur;
        for (char c : get(key)) {
            if (c == ',') {
                out.push_back(trim(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        out.push_back(trim(cur));
        std::vector<std::string> cleaned;
        for (auto& s : out) {
            if (!s.empty()) cleaned.push_back(std::move(s));
        }
        if (cleaned.empty()) throw std::runtime_error("config: empty list for key '" + key + "'");
        return cleaned;
    }

    std::vector<std::uint64_t> get_u64_list(const std::string& key) const {
        std::vector<std::uint64_t> out;
        for (const auto& s : get_list(key)) out.push_back(parse_u64(s, key));
        return out;
    }

    // Sorted key=value rendering; hashing this pins artifact file names to
    // the exact configuration.
    std::string canonical() const {
        std::ostringstream out;
        for (const auto& [k, v] : kv_) out << k << '=' << v << '\n';
        return out.str();
    }

 private:
    static std::string trim(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    static std::uint64_t parse_u64(const std::string& s, const std::string& key) {
        try {
            std::size_t pos = 0;
            const unsigned long long v = std::stoull(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error("config: key '" + key + "' is not an unsigned integer: " + s);
        }
    }

    static double parse_double(const std::string& s, const std::string& key) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error("config: key '" + key + "' is not a number: " + s);
        }
    }

    std::map<std::string, std::string> kv_;
};

}  // namespace linf
