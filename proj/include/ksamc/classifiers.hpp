#pragma once

#include <map>
#include <span>
#include <stdexcept>

#include "ksamc/cdf_model.hpp"
#include "ksamc/constellation.hpp"
#include "ksamc/ks_core.hpp"

namespace ksamc {

using FormatScores = std::map<Modulation, double>;

/// Hard and soft output of a K-S classification over a candidate set.
struct ClassificationResult {
    Modulation decided{};
    FormatScores d_hat;      ///< K-S distance per candidate
    FormatScores alpha_hat;  ///< significance level per candidate
    FormatScores soft;       ///< normalized significance levels, sums to 1
};

/**
 * Minimum-distance K-S classification against the exact theoretical CDFs.
 *
 * Samples are split into 2N quadrature statistics; each candidate's CDF is
 * evaluated at noise level `sigma`. The decision is the smallest distance,
 * ties going to the lower modulation order. Significance levels use M = 2N.
 */
ClassificationResult classify_ks_exact(std::span<const Complex> samples, double sigma,
                                       std::span<const Modulation> candidates,
                                       JumpSides sides = JumpSides::Both);

/// Same pipeline with CDFs read from `table` at the SNR node nearest
/// `snr_db_assumed`. Throws std::out_of_range if a candidate is not stored.
ClassificationResult classify_ks_table(std::span<const Complex> samples, double snr_db_assumed,
                                       const QuantizedCdfTable& table,
                                       std::span<const Modulation> candidates,
                                       JumpSides sides = JumpSides::Both);

/// q_k = alpha_k / sum(alpha); uniform when every alpha is below 1e-300.
/// Throws std::invalid_argument on negative input.
FormatScores soft_decision(const FormatScores& alpha_hat);

/// Raised when a statistic is undefined for the given input.
class DegenerateInputError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/**
 * Normalized sample fourth-order cumulant
 * (E|y|^4 - |E y^2|^2 - 2 (E|y|^2)^2) / (E|y|^2 - sigma^2)^2 with plain
 * sample means. Throws DegenerateInputError when |E|y|^2 - sigma^2| < 1e-9
 * and std::invalid_argument on empty input.
 */
double sample_c42(std::span<const Complex> samples, double sigma_sq);

/// Candidate whose theoretical C42 is closest to c42_hat (ties to lower order).
Modulation nearest_cumulant(double c42_hat, std::span<const Modulation> candidates);

Modulation classify_cumulant(std::span<const Complex> samples, double sigma_sq,
                             std::span<const Modulation> candidates);

}  // namespace ksamc
