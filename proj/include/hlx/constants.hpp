#pragma once

/**
 * @file constants.hpp
 * @brief Frozen empirical constants read from a key=value file.
 *
 * Lines are `key = value`; `#` starts a comment. The file named by the
 * HLX_CONSTANTS environment variable wins over the compiled-in default.
 */

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hlx {

class EmpiricalConstants {
public:
    EmpiricalConstants() = default;

    static EmpiricalConstants parse(std::istream& in, const std::string& origin = "<stream>") {
        EmpiricalConstants c;
        c.origin_ = origin;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const auto eq = line.find('=');
            const std::string key = trim(line.substr(0, eq));
            if (eq == std::string::npos) {
                if (!key.empty()) throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": expected key = value");
                continue;
            }
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty() || value.empty())
                throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key or value");
            c.values_[key] = value;
        }
        return c;
    }

    static EmpiricalConstants load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open constants file " + path);
        return parse(in, path);
    }

    static std::string default_path() {
        if (const char* env = std::getenv("HLX_CONSTANTS"); env && *env) return env;
#ifdef HLX_DEFAULT_CONSTANTS_FILE
        return HLX_DEFAULT_CONSTANTS_FILE;
#else
        return "constants/empirical.conf";
#endif
    }

    static EmpiricalConstants load_default() { return load(default_path()); }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    double get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw std::out_of_range("constant '" + key + "' missing from " + origin_);
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(it->second, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != it->second.size()) throw std::runtime_error("constant '" + key + "' is not a number");
        return v;
    }

    double get_or(const std::string& key, double fallback) const { return has(key) ? get(key) : fallback; }

    std::string version() const {
        auto it = values_.find("version");
        return it == values_.end() ? "unversioned" : it->second;
    }

    const std::string& origin() const { return origin_; }
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    std::string origin_;
    std::map<std::string, std::string> values_;
};

}  // namespace hlx
