#include "ksamc/classifiers.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace ksamc {

namespace {

std::vector<Modulation> checked_candidates(std::span<const Modulation> candidates)
{
    if (candidates.empty())
        throw std::invalid_argument("candidate set is empty");
    return canonical_candidates(candidates);
}

template <typename CdfFor>
ClassificationResult classify_with(const SampleSet& set, std::span<const Modulation> candidates,
                                   JumpSides sides, CdfFor&& cdf_for)
{
    ClassificationResult result;
    double best = std::numeric_limits<double>::infinity();
    for (Modulation m : candidates) {
        const double d = ks_statistic(set, cdf_for(m), sides);
        result.d_hat[m] = d;
        result.alpha_hat[m] = ks_significance(set.count(), d);
        // candidates are ascending in order, so strict < keeps the lower one on ties
        if (d < best) {
            best = d;
            result.decided = m;
        }
    }
    result.soft = soft_decision(result.alpha_hat);
    return result;
}

}  // namespace

ClassificationResult classify_ks_exact(std::span<const Complex> samples, double sigma,
                                       std::span<const Modulation> candidates, JumpSides sides)
{
    const auto cands = checked_candidates(candidates);
    if (!(sigma > 0.0))
        throw std::invalid_argument("classify_ks_exact needs sigma > 0");
    const SampleSet set = quadrature_split(samples);
    return classify_with(set, cands, sides, [sigma](Modulation m) -> CdfFunction {
        return TheoreticalCdf(m, sigma);
    });
}

ClassificationResult classify_ks_table(std::span<const Complex> samples, double snr_db_assumed,
                                       const QuantizedCdfTable& table,
                                       std::span<const Modulation> candidates, JumpSides sides)
{
    const auto cands = checked_candidates(candidates);
    const std::size_t snr_index = table.nearest_snr_index(snr_db_assumed);
    for (Modulation m : cands)
        if (!table.contains(m))
            throw std::out_of_range("CDF table has no curves for " + std::string(to_string(m)));
    const SampleSet set = quadrature_split(samples);
    return classify_with(set, cands, sides, [&](Modulation m) -> CdfFunction {
        return [row = table.row(m, snr_index)](double z) { return interpolate_cdf_row(row, z); };
    });
}

FormatScores soft_decision(const FormatScores& alpha_hat)
{
    if (alpha_hat.empty())
        throw std::invalid_argument("soft_decision: no candidates");
    double total = 0.0;
    bool any_mass = false;
    for (const auto& [m, a] : alpha_hat) {
        if (!(a >= 0.0))
            throw std::invalid_argument("soft_decision: negative significance level");
        total += a;
        any_mass = any_mass || a >= 1e-300;
    }
    FormatScores q;
    for (const auto& [m, a] : alpha_hat)
        q[m] = any_mass ? a / total : 1.0 / static_cast<double>(alpha_hat.size());
    return q;
}

double sample_c42(std::span<const Complex> samples, double sigma_sq)
{
    if (samples.empty())
        throw std::invalid_argument("sample_c42: no samples");
    double m2 = 0.0, m4 = 0.0;
    Complex m20 = 0.0;
    for (const Complex& y : samples) {
        const double p = std::norm(y);
        m2 += p;
        m4 += p * p;
        m20 += y * y;
    }
    const double n = static_cast<double>(samples.size());
    m2 /= n;
    m4 /= n;
    m20 /= n;
    const double signal_power = m2 - sigma_sq;
    if (std::abs(signal_power) < 1e-9)
        throw DegenerateInputError("sample_c42: received power equals the noise power");
    return (m4 - std::norm(m20) - 2.0 * m2 * m2) / (signal_power * signal_power);
}

Modulation nearest_cumulant(double c42_hat, std::span<const Modulation> candidates)
{
    const auto cands = checked_candidates(candidates);
    Modulation best = cands.front();
    double best_dist = std::numeric_limits<double>::infinity();
    for (Modulation m : cands) {
        const double d = std::abs(c42_hat - theoretical_c42(m));
        if (d < best_dist) {
            best_dist = d;
            best = m;
        }
    }
    return best;
}

Modulation classify_cumulant(std::span<const Complex> samples, double sigma_sq,
                             std::span<const Modulation> candidates)
{
    return nearest_cumulant(sample_c42(samples, sigma_sq), candidates);
}

}  // namespace ksamc
