#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ksamc/constellation.hpp"

namespace ksamc {

/// Sorted, finite real-valued decision statistics. Immutable once built.
class SampleSet {
public:
    /// Sorts the values. Throws std::invalid_argument if empty or non-finite.
    explicit SampleSet(std::vector<double> values);

    std::span<const double> values() const { return values_; }
    std::size_t count() const { return values_.size(); }

private:
    std::vector<double> values_;
};

/// Pools real and imaginary parts of the received samples: 2N statistics.
SampleSet quadrature_split(std::span<const Complex> samples);

/// (1/M) #{z_n <= z}, by binary search.
double ecdf_eval(const SampleSet& set, double z);

using CdfFunction = std::function<double(double)>;

/// Which side(s) of each ECDF jump enter the K-S supremum.
enum class JumpSides {
    Both,       ///< max(|i/M - F|, |(i-1)/M - F|): the exact supremum
    UpperOnly,  ///< |F_hat(z_n) - F(z_n)| at the sample points only
};

/**
 * One-sample K-S distance between the ECDF of `set` and a hypothesised CDF.
 * Throws std::domain_error if `cdf` leaves [0, 1].
 */
double ks_statistic(const SampleSet& set, const CdfFunction& cdf,
                    JumpSides sides = JumpSides::Both);

/**
 * Kolmogorov tail function 2 sum_{m>=1} (-1)^{m-1} exp(-2 m^2 x^2).
 *
 * Returns 1 for x <= 0.05, where the series does not converge usefully and
 * its right limit is 1 to more than 12 digits. Otherwise the series is
 * summed until a term falls below 1e-12 or m reaches 100, then clamped to
 * [0, 1]. Below x = 1 the equivalent form
 * 1 - (sqrt(2 pi) / x) sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 x^2)) is used so the
 * result stays monotone near 1. Throws std::domain_error for negative x.
 */
double ks_q(double x);

/// Asymptotic P(D > d_hat) for M samples, with the usual finite-M correction.
double ks_significance(std::size_t count, double d_hat);

/// Standard normal upper tail P(Z > a).
double gaussian_q(double a);

}  // namespace ksamc
