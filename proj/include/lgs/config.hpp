#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace lgs {

// Flat key=value configuration: one pair per line, '#' starts a comment,
// later assignments win. Command-line overrides are applied the same way.
class KvConfig {
  public:
    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("config: cannot open " + path);
        std::string line;
        while (std::getline(in, line)) parse_line(line);
    }

    void set(const std::string& assignment) {
        parse_line(assignment);
    }

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get_string(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw std::invalid_argument("config: missing required key '" + key + "'");
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }

    long get_long(const std::string& key, long fallback, long lo, long hi) const {
        if (!has(key)) return check_range(key, fallback, lo, hi);
        return check_range(key, parse_long(key, get_string(key)), lo, hi);
    }

    long get_long_required(const std::string& key, long lo, long hi) const {
        return check_range(key, parse_long(key, get_string(key)), lo, hi);
    }

    double get_double(const std::string& key, double fallback, double lo, double hi) const {
        double v = has(key) ? parse_double(key, get_string(key)) : fallback;
        if (!(v >= lo && v <= hi))
            throw std::invalid_argument("config: key '" + key + "' out of range");
        return v;
    }

    std::vector<double> get_doubles(const std::string& key,
                                    const std::vector<double>& fallback) const {
        if (!has(key)) return fallback;
        std::vector<double> out;
        std::istringstream ss(get_string(key));
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(parse_double(key, tok));
        if (out.empty()) throw std::invalid_argument("config: key '" + key + "' is empty");
        return out;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const std::string v = get_string(key);
        if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
        if (v == "0" || v == "false" || v == "off" || v == "no") return false;
        throw std::invalid_argument("config: key '" + key + "' is not a boolean");
    }

  private:
    static std::string trim(const std::string& s) {
        size_t a = s.find_first_not_of(" \t\r\n");
        size_t b = s.find_last_not_of(" \t\r\n");
        return a == std::string::npos ? "" : s.substr(a, b - a + 1);
    }

    void parse_line(const std::string& raw) {
        std::string line = raw;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) return;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key=value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config: empty key in '" + line + "'");
        kv_[key] = val;
    }

    static long parse_long(const std::string& key, const std::string& v) {
        try {
            size_t pos = 0;
            long out = std::stol(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return out;
        } catch (...) {
            throw std::invalid_argument("config: key '" + key + "' is not an integer");
        }
    }

    static double parse_double(const std::string& key, const std::string& v) {
        try {
            size_t pos = 0;
            double out = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return out;
        } catch (...) {
            throw std::invalid_argument("config: key '" + key + "' is not a number");
        }
    }

    static long check_range(const std::string& key, long v, long lo, long hi) {
        if (v < lo || v > hi)
            throw std::invalid_argument("config: key '" + key + "' out of range");
        return v;
    }

    std::map<std::string, std::string> kv_;
};

}  // namespace lgs
