#include "ksamc/constellation.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ksamc {

namespace {

std::uint32_t gray(std::uint32_t v) { return v ^ (v >> 1); }

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

}  // namespace

std::string_view to_string(Modulation m)
{
    switch (m) {
    case Modulation::Qam4: return "QAM4";
    case Modulation::Qam16: return "QAM16";
    case Modulation::Qam64: return "QAM64";
    }
    return "?";
}

Modulation parse_modulation(std::string_view name)
{
    name = trim(name);
    for (Modulation m : kAllModulations)
        if (name == to_string(m))
            return m;
    throw std::invalid_argument("unknown modulation '" + std::string(name) + "'");
}

std::vector<Modulation> parse_modulation_list(std::string_view list)
{
    std::vector<Modulation> out;
    while (!list.empty()) {
        auto comma = list.find(',');
        auto item = trim(list.substr(0, comma));
        if (!item.empty())
            out.push_back(parse_modulation(item));
        if (comma == std::string_view::npos)
            break;
        list.remove_prefix(comma + 1);
    }
    return canonical_candidates(out);
}

std::vector<Modulation> canonical_candidates(std::span<const Modulation> candidates)
{
    std::vector<Modulation> out(candidates.begin(), candidates.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Constellation::Constellation(Modulation format) : format_(format)
{
    const unsigned levels = levels_per_rail(format);
    const unsigned half_bits = bits_per_symbol(format) / 2;
    // mean |a + jb|^2 over odd levels -(L-1)..(L-1) is 2 (L^2 - 1) / 3
    scale_ = 1.0 / std::sqrt(2.0 * (levels * levels - 1) / 3.0);

    real_levels_.reserve(levels);
    for (unsigned i = 0; i < levels; ++i)
        real_levels_.push_back(scale_ * (2.0 * i - (levels - 1.0)));

    points_.reserve(order(format));
    bits_.reserve(order(format));
    index_of_bits_.assign(order(format), 0);
    for (unsigned ia = 0; ia < levels; ++ia) {
        for (unsigned ib = 0; ib < levels; ++ib) {
            points_.emplace_back(real_levels_[ia], real_levels_[ib]);
            const std::uint32_t label = (gray(ia) << half_bits) | gray(ib);
            index_of_bits_[label] = bits_.size();
            bits_.push_back(label);
        }
    }
}

const Constellation& constellation_points(Modulation format)
{
    static const std::array<Constellation, 3> table = {
        Constellation(Modulation::Qam4), Constellation(Modulation::Qam16),
        Constellation(Modulation::Qam64)};
    return table[static_cast<std::size_t>(format)];
}

std::vector<Complex> modulate(std::span<const std::size_t> indices,
                              const Constellation& constellation)
{
    std::vector<Complex> out;
    out.reserve(indices.size());
    for (std::size_t idx : indices) {
        if (idx >= constellation.size())
            throw std::out_of_range("symbol index " + std::to_string(idx) + " out of range for " +
                                    std::string(to_string(constellation.format())));
        out.push_back(constellation.point(idx));
    }
    return out;
}

std::size_t demodulate_min_distance(Complex sample, const Constellation& constellation)
{
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    const auto pts = constellation.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = std::norm(sample - pts[i]);
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return best;
}

unsigned bit_errors(const Constellation& constellation, std::size_t sent, std::size_t decided)
{
    return static_cast<unsigned>(
        std::popcount(constellation.bits_of(sent) ^ constellation.bits_of(decided)));
}

double theoretical_c42(Modulation format)
{
    const auto pts = constellation_points(format).points();
    double m4 = 0.0, m2 = 0.0;
    Complex m20 = 0.0;
    for (const Complex& x : pts) {
        const double p = std::norm(x);
        m2 += p;
        m4 += p * p;
        m20 += x * x;
    }
    const double n = static_cast<double>(pts.size());
    m2 /= n;
    m4 /= n;
    m20 /= n;
    return m4 - std::norm(m20) - 2.0 * m2 * m2;
}

}  // namespace ksamc
