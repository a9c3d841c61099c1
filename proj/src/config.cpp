#include "ksamc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ksamc {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

double parse_double_value(std::string_view text, std::string_view what)
{
    text = trim(text);
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size() ||
        !std::isfinite(v))
        throw ConfigError("bad number '" + std::string(text) + "' for " + std::string(what));
    return v;
}

std::uint64_t parse_uint_value(std::string_view text, std::string_view what)
{
    text = trim(text);
    std::uint64_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ConfigError("bad integer '" + std::string(text) + "' for " + std::string(what));
    return v;
}

std::vector<std::string> split_list(std::string_view text)
{
    std::vector<std::string> out;
    while (true) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        if (!item.empty())
            out.emplace_back(item);
        if (comma == std::string_view::npos)
            break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

std::vector<double> parse_double_list(std::string_view text, std::string_view what)
{
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        const auto c1 = item.find(':');
        if (c1 == std::string::npos) {
            out.push_back(parse_double_value(item, what));
            continue;
        }
        const auto c2 = item.find(':', c1 + 1);
        if (c2 == std::string::npos)
            throw ConfigError("range for " + std::string(what) + " must be start:step:stop");
        const double start = parse_double_value(item.substr(0, c1), what);
        const double step = parse_double_value(item.substr(c1 + 1, c2 - c1 - 1), what);
        const double stop = parse_double_value(item.substr(c2 + 1), what);
        if (!(step > 0.0) || stop < start)
            throw ConfigError("empty or reversed range for " + std::string(what));
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long i = 0; i <= count; ++i)
            out.push_back(start + static_cast<double>(i) * step);
    }
    return out;
}

ConfigMap ConfigMap::parse(std::string_view text)
{
    ConfigMap cfg;
    std::size_t lineno = 0;
    while (!text.empty()) {
        ++lineno;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        const auto key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        cfg.set(std::string(key), std::string(trim(line.substr(eq + 1))));
    }
    return cfg;
}

ConfigMap ConfigMap::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void ConfigMap::set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

std::vector<std::string> ConfigMap::keys() const
{
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        out.push_back(k);
    return out;
}

std::optional<std::string> ConfigMap::get(const std::string& key) const
{
    auto it = values_.find(key);
    if (it == values_.end())
        return std::nullopt;
    return it->second;
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const
{
    return get(key).value_or(fallback);
}

double ConfigMap::get_double(const std::string& key, double fallback) const
{
    auto v = get(key);
    return v ? parse_double_value(*v, key) : fallback;
}

std::uint64_t ConfigMap::get_uint(const std::string& key, std::uint64_t fallback) const
{
    auto v = get(key);
    return v ? parse_uint_value(*v, key) : fallback;
}

std::vector<double> ConfigMap::get_doubles(const std::string& key,
                                           std::vector<double> fallback) const
{
    auto v = get(key);
    return v ? parse_double_list(*v, key) : fallback;
}

std::vector<std::string> ConfigMap::get_strings(const std::string& key,
                                                std::vector<std::string> fallback) const
{
    auto v = get(key);
    return v ? split_list(*v) : fallback;
}

}  // namespace ksamc
