#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ksamc {

using Complex = std::complex<double>;

/// Candidate modulation formats. Enumerators are ordered by modulation order.
enum class Modulation : std::uint8_t { Qam4, Qam16, Qam64 };

inline constexpr Modulation kAllModulations[] = {Modulation::Qam4, Modulation::Qam16,
                                                 Modulation::Qam64};

constexpr unsigned bits_per_symbol(Modulation m)
{
    switch (m) {
    case Modulation::Qam4: return 2;
    case Modulation::Qam16: return 4;
    case Modulation::Qam64: return 6;
    }
    return 0;
}

constexpr unsigned order(Modulation m) { return 1u << bits_per_symbol(m); }

/// Number of amplitude levels per rail (sqrt of the order).
constexpr unsigned levels_per_rail(Modulation m) { return 1u << (bits_per_symbol(m) / 2); }

/// "QAM4", "QAM16" or "QAM64".
std::string_view to_string(Modulation m);

/// Inverse of to_string(). Throws std::invalid_argument on unknown names.
Modulation parse_modulation(std::string_view name);

/// Parses a comma separated list such as "QAM4,QAM16". Result is sorted by
/// order with duplicates removed.
std::vector<Modulation> parse_modulation_list(std::string_view list);

/// Sorts by order and removes duplicates.
std::vector<Modulation> canonical_candidates(std::span<const Modulation> candidates);

/**
 * Unit average energy square QAM constellation.
 *
 * Points are stored row-major over (real level, imaginary level), both
 * ascending, so index = ia * L + ib for L levels per rail. Bit labels are
 * Gray coded independently per rail: the high half of the label carries the
 * real rail, the low half the imaginary rail.
 */
class Constellation {
public:
    explicit Constellation(Modulation format);

    Modulation format() const { return format_; }
    std::size_t size() const { return points_.size(); }
    std::span<const Complex> points() const { return points_; }
    const Complex& point(std::size_t index) const { return points_.at(index); }

    /// Distinct real-axis coordinates, ascending.
    std::span<const double> real_levels() const { return real_levels_; }

    /// Normalization constant c: points are c * (a + jb) for odd integers a, b.
    double scale() const { return scale_; }

    std::uint32_t bits_of(std::size_t index) const { return bits_.at(index); }
    std::size_t index_of_bits(std::uint32_t bits) const { return index_of_bits_.at(bits); }

private:
    Modulation format_;
    double scale_;
    std::vector<Complex> points_;
    std::vector<double> real_levels_;
    std::vector<std::uint32_t> bits_;
    std::vector<std::size_t> index_of_bits_;
};

/// Shared immutable instance for each format.
const Constellation& constellation_points(Modulation format);

/// Maps point indices to symbols. Throws std::out_of_range on a bad index.
std::vector<Complex> modulate(std::span<const std::size_t> indices,
                              const Constellation& constellation);

/// Nearest point by Euclidean distance; ties go to the lowest index.
std::size_t demodulate_min_distance(Complex sample, const Constellation& constellation);

/// Number of differing bits between the labels of two point indices.
unsigned bit_errors(const Constellation& constellation, std::size_t sent, std::size_t decided);

/// E|x|^4 - |E x^2|^2 - 2 (E|x|^2)^2 over equiprobable constellation points.
double theoretical_c42(Modulation format);

}  // namespace ksamc
