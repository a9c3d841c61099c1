#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ksamc {

/// Invalid or inconsistent configuration. The CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable file, or malformed data file. Exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Flat key=value configuration. '#' starts a comment; list values are comma
 * separated, and numeric lists also accept start:step:stop ranges.
 */
class ConfigMap {
public:
    static ConfigMap parse(std::string_view text);
    static ConfigMap load(const std::filesystem::path& path);

    /// Later assignments win; used for command line overrides.
    void set(std::string key, std::string value);
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::vector<std::string> keys() const;

    std::optional<std::string> get(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
    std::vector<std::string> get_strings(const std::string& key,
                                         std::vector<std::string> fallback) const;

private:
    std::map<std::string, std::string> values_;
};

double parse_double_value(std::string_view text, std::string_view what);
std::uint64_t parse_uint_value(std::string_view text, std::string_view what);

/// "1,2,5" or "-5:1:25" (inclusive) or a mix such as "0,10:5:20".
std::vector<double> parse_double_list(std::string_view text, std::string_view what);

std::vector<std::string> split_list(std::string_view text);

}  // namespace ksamc
