#include "ksamc/iq_file.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "ksamc/config.hpp"

namespace ksamc {

namespace {

bool is_csv(const std::filesystem::path& path) { return path.extension() == ".csv"; }

std::uint64_t le64(std::uint64_t v)
{
    if constexpr (std::endian::native == std::endian::big)
        return __builtin_bswap64(v);
    return v;
}

}  // namespace

std::vector<Complex> read_iq_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read IQ file " + path.string());
    std::vector<Complex> out;

    if (is_csv(path)) {
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.find_first_not_of(" \t") == std::string::npos)
                continue;
            const auto comma = line.find(',');
            try {
                if (comma == std::string::npos)
                    throw ConfigError("missing comma");
                const double re = parse_double_value(line.substr(0, comma), "re");
                const double im = parse_double_value(line.substr(comma + 1), "im");
                out.emplace_back(re, im);
            } catch (const ConfigError&) {
                if (lineno == 1 && out.empty())
                    continue;  // header row
                throw IoError(path.string() + ":" + std::to_string(lineno) +
                              ": expected 're,im'");
            }
        }
    } else {
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::string bytes = std::move(buf).str();
        if (bytes.size() % 16 != 0)
            throw IoError("binary IQ file " + path.string() +
                          " is not a whole number of float64 pairs");
        out.reserve(bytes.size() / 16);
        for (std::size_t off = 0; off < bytes.size(); off += 16) {
            std::uint64_t re, im;
            std::memcpy(&re, bytes.data() + off, 8);
            std::memcpy(&im, bytes.data() + off + 8, 8);
            out.emplace_back(std::bit_cast<double>(le64(re)), std::bit_cast<double>(le64(im)));
        }
    }
    if (out.empty())
        throw IoError("IQ file " + path.string() + " holds no samples");
    return out;
}

void write_iq_file(const std::filesystem::path& path, std::span<const Complex> samples)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write IQ file " + path.string());
    if (is_csv(path)) {
        out << "re,im\n";
        char buf[64];
        for (const Complex& s : samples) {
            out.write(buf, std::to_chars(buf, buf + sizeof buf, s.real()).ptr - buf);
            out << ',';
            out.write(buf, std::to_chars(buf, buf + sizeof buf, s.imag()).ptr - buf);
            out << '\n';
        }
    } else {
        for (const Complex& s : samples) {
            const std::uint64_t re = le64(std::bit_cast<std::uint64_t>(s.real()));
            const std::uint64_t im = le64(std::bit_cast<std::uint64_t>(s.imag()));
            out.write(reinterpret_cast<const char*>(&re), 8);
            out.write(reinterpret_cast<const char*>(&im), 8);
        }
    }
    if (!out)
        throw IoError("failed writing IQ file " + path.string());
}

}  // namespace ksamc
