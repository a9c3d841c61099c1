#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksamc/constellation.hpp"

namespace ksamc {

/**
 * CDF of one quadrature component of a QAM symbol in CN(0, sigma^2) noise:
 * an equal-weight mixture of N(x, sigma^2 / 2) over the constellation's real
 * levels x. Throws std::invalid_argument if sigma <= 0.
 */
double theoretical_cdf_eval(Modulation format, double sigma, double z);

/// Callable form of theoretical_cdf_eval for a fixed format and noise level.
class TheoreticalCdf {
public:
    TheoreticalCdf(Modulation format, double sigma);

    Modulation format() const { return format_; }
    double sigma() const { return sigma_; }
    double operator()(double z) const;

private:
    Modulation format_;
    double sigma_;
    std::span<const double> levels_;
    double inv_scale_;
};

/// z grid shared by every stored CDF curve: [-4, 4] in steps of 0.01.
struct CdfZGrid {
    static constexpr double kMin = -4.0;
    static constexpr double kMax = 4.0;
    static constexpr double kStep = 0.01;
    static constexpr std::size_t kCount = 801;

    static double node(std::size_t i) { return (static_cast<double>(i) - 400.0) / 100.0; }
};

/**
 * Theoretical CDF curves precomputed on a uniform SNR grid, one curve per
 * (format, SNR) pair, each sampled on CdfZGrid.
 *
 * SNR node i is snr_start + i * snr_step. Values are stored row-major over
 * (format, snr, z).
 */
class QuantizedCdfTable {
public:
    QuantizedCdfTable(std::vector<Modulation> formats, double snr_start, double snr_step,
                      std::size_t snr_count, std::vector<double> values);

    std::span<const Modulation> formats() const { return formats_; }
    bool contains(Modulation format) const;

    double snr_start() const { return snr_start_; }
    double snr_step() const { return snr_step_; }
    std::size_t snr_count() const { return snr_count_; }
    double snr_node(std::size_t i) const { return snr_start_ + static_cast<double>(i) * snr_step_; }

    /// Nearest SNR node, ties toward the lower node, clamped to the grid.
    std::size_t nearest_snr_index(double snr_db) const;

    /// Stored curve for (format, SNR node). Throws std::out_of_range if absent.
    std::span<const double> row(Modulation format, std::size_t snr_index) const;

    std::span<const double> values() const { return values_; }

    friend bool operator==(const QuantizedCdfTable&, const QuantizedCdfTable&) = default;

private:
    std::size_t format_slot(Modulation format) const;

    std::vector<Modulation> formats_;
    double snr_start_;
    double snr_step_;
    std::size_t snr_count_;
    std::vector<double> values_;
};

/// Uniform grid covering [lo, hi] with nodes at integer multiples of step.
std::vector<double> anchored_snr_grid(double lo, double hi, double step);

/**
 * Evaluates the theoretical CDF of every format at every SNR of
 * `snr_grid_db` (which must be uniformly spaced by `granularity_db`) on the
 * shared z grid. Throws std::invalid_argument on empty or non-uniform grids.
 */
QuantizedCdfTable build_cdf_table(std::span<const Modulation> formats,
                                  std::span<const double> snr_grid_db, double granularity_db);

/// Linear interpolation along one stored curve; 0 below -4 and 1 above 4.
double interpolate_cdf_row(std::span<const double> row, double z);

/// Nearest-SNR curve, then interpolate_cdf_row. Throws std::out_of_range if
/// the format is not stored.
double table_lookup(const QuantizedCdfTable& table, Modulation format, double snr_db, double z);

enum class TableErrc {
    Version,       ///< missing magic line or unsupported version
    Header,        ///< malformed header field
    Truncated,     ///< payload shorter than the header implies
    TrailingData,  ///< bytes after the payload
    NonMonotone,   ///< a stored curve decreases along z
    BadValue,      ///< non-finite value or value outside [0, 1]
};

class TableFormatError : public std::runtime_error {
public:
    TableFormatError(TableErrc code, const std::string& what)
        : std::runtime_error(what), code_(code)
    {
    }
    TableErrc code() const { return code_; }

private:
    TableErrc code_;
};

/**
 * File layout:
 *
 *     KSAMC-CDF v1
 *     formats=QAM4,QAM16,QAM64
 *     snr_db=<start>:<step>:<stop>
 *     z=-4:0.01:4
 *     <blank line>
 *     <float64 little-endian payload, row-major (format, snr, z)>
 */
void serialize_table(const QuantizedCdfTable& table, std::ostream& out);
std::string serialize_table(const QuantizedCdfTable& table);

/// Throws TableFormatError.
QuantizedCdfTable deserialize_table(std::istream& in);
QuantizedCdfTable deserialize_table(const std::string& bytes);

}  // namespace ksamc
