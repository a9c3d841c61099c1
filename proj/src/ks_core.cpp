#include "ksamc/ks_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ksamc {

SampleSet::SampleSet(std::vector<double> values) : values_(std::move(values))
{
    if (values_.empty())
        throw std::invalid_argument("sample set must not be empty");
    for (double v : values_)
        if (!std::isfinite(v))
            throw std::invalid_argument("sample set contains a non-finite value");
    std::sort(values_.begin(), values_.end());
}

SampleSet quadrature_split(std::span<const Complex> samples)
{
    if (samples.empty())
        throw std::invalid_argument("quadrature_split: no samples");
    std::vector<double> z;
    z.reserve(2 * samples.size());
    for (const Complex& y : samples) {
        z.push_back(y.real());
        z.push_back(y.imag());
    }
    return SampleSet(std::move(z));
}

double ecdf_eval(const SampleSet& set, double z)
{
    const auto v = set.values();
    const auto below = std::upper_bound(v.begin(), v.end(), z) - v.begin();
    return static_cast<double>(below) / static_cast<double>(v.size());
}

double ks_statistic(const SampleSet& set, const CdfFunction& cdf, JumpSides sides)
{
    const auto v = set.values();
    const double m = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = cdf(v[i]);
        if (!(f >= 0.0 && f <= 1.0))
            throw std::domain_error("hypothesised CDF returned a value outside [0, 1]");
        if (sides == JumpSides::Both) {
            d = std::max({d, std::abs(static_cast<double>(i + 1) / m - f),
                          std::abs(static_cast<double>(i) / m - f)});
        } else {
            // ECDF at z_(i) counts every tied sample
            std::size_t j = i;
            while (j + 1 < v.size() && v[j + 1] == v[i])
                ++j;
            d = std::max(d, std::abs(static_cast<double>(j + 1) / m - f));
        }
    }
    return d;
}

double ks_q(double x)
{
    if (x < 0.0 || std::isnan(x))
        throw std::domain_error("ks_q: argument must be nonnegative");
    if (x <= 0.05)
        return 1.0;
    if (x < 1.0) {
        const double b = -std::numbers::pi * std::numbers::pi / (8.0 * x * x);
        double tail = 0.0;
        for (int k = 1; k <= 100; ++k) {
            const double odd = 2.0 * k - 1.0;
            const double term = std::exp(b * odd * odd);
            tail += term;
            if (term < 1e-17)
                break;
        }
        return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / x * tail, 0.0, 1.0);
    }
    const double a = -2.0 * x * x;
    double sum = 0.0;
    double sign = 1.0;
    for (int m = 1; m <= 100; ++m) {
        const double term = std::exp(a * m * m);
        sum += sign * term;
        if (term < 1e-12)
            break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_significance(std::size_t count, double d_hat)
{
    if (count == 0)
        throw std::invalid_argument("ks_significance: count must be positive");
    if (!(d_hat >= 0.0 && d_hat <= 1.0))
        throw std::domain_error("ks_significance: distance outside [0, 1]");
    const double root = std::sqrt(static_cast<double>(count));
    return ks_q((root + 0.12 + 0.11 / root) * d_hat);
}

double gaussian_q(double a) { return 0.5 * std::erfc(a / std::numbers::sqrt2); }

}  // namespace ksamc
