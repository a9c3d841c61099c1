#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ksamc/cdf_model.hpp"
#include "ksamc/channel.hpp"
#include "ksamc/constellation.hpp"

namespace ksamc {

/**
 * Unbiased MMSE filter passing the `target` user and suppressing the other.
 *
 * m = alpha (h h^H + sigma^2 I)^-1 g with alpha = [g^H (h h^H + sigma^2 I)^-1 g]^-1,
 * so that m^H g = 1. The filter output is then g's symbol plus a residual
 * of variance |m^H h|^2 + sigma^2 |m|^2.
 */
struct MmseFilter {
    Eigen::Vector2cd m;
    Complex alpha;
    double residual_var = 0.0;
};

/// `h` is the user to suppress, `g` the user to extract. Throws
/// std::invalid_argument if sigma_sq <= 0 and std::domain_error if g = 0.
MmseFilter mmse_design(const Eigen::Vector2cd& h, const Eigen::Vector2cd& g, double sigma_sq);

/// gamma' = m^H y.
Complex mmse_output(const MmseFilter& filter, const Eigen::Vector2cd& y);

enum class InterfererClassifier { KsExact, KsTable, Cumulant };

/**
 * Classifies a group of MMSE outputs as if they were AWGN observations with
 * variance `residual_var` (the group mean). `table` is required for KsTable.
 */
Modulation classify_interferer(std::span<const Complex> gamma_primes, double residual_var,
                               InterfererClassifier method,
                               std::span<const Modulation> candidates,
                               const QuantizedCdfTable* table = nullptr);

struct CancellationOutput {
    Complex beta;          ///< h^H (y - g x'), before normalization
    std::size_t decided;   ///< desired point index decided from beta / |h|^2
};

/// Throws std::domain_error if |h|^2 < 1e-12.
CancellationOutput cancel_and_demod(const Eigen::Vector2cd& y, const Eigen::Vector2cd& h,
                                    const Eigen::Vector2cd& g, Complex x_prime_hat,
                                    const Constellation& desired);

enum class ReceiverMode { MmseOnly, IcKs, IcCumulant, Ideal };

std::string_view to_string(ReceiverMode mode);
ReceiverMode parse_receiver_mode(std::string_view name);

struct SdmaFrameConfig {
    std::size_t subcarriers = 512;
    std::size_t words = 1;
    std::size_t group_size = 0;  ///< 0 means one group spanning every subcarrier
    Modulation desired = Modulation::Qam16;
    Modulation interferer = Modulation::Qam16;
    double interferer_power = 1.0;
    double sigma_sq = 0.01;
    std::vector<Modulation> candidates{std::begin(kAllModulations), std::end(kAllModulations)};
    bool use_table = false;  ///< ic-ks reads CDFs from `table` instead of the exact model
    const QuantizedCdfTable* table = nullptr;

    /// Throws std::invalid_argument when inconsistent.
    void validate() const;
    std::size_t effective_group_size() const { return group_size == 0 ? subcarriers : group_size; }
};

/// Transmitted and received signals of one frame, indexed (subcarrier, word).
struct SdmaFrame {
    SdmaChannelSet channels;
    std::vector<std::size_t> desired_indices;
    std::vector<std::size_t> interferer_indices;
    Eigen::MatrixXcd x;
    Eigen::MatrixXcd x_prime;
    ReceivedFrame y{0, 0};
};

/// Draws channels, symbols and noise from substreams of `frame_seed`.
SdmaFrame generate_sdma_frame(const SdmaFrameConfig& config, std::uint64_t frame_seed);

struct SdmaReceiverReport {
    std::vector<Modulation> classified;  ///< per group; empty unless the mode classifies
    Modulation interferer_true = Modulation::Qam4;
    std::size_t misclassified_groups = 0;
    std::size_t interferer_symbol_errors = 0;
    std::size_t desired_bit_errors = 0;
    std::size_t desired_bits_total = 0;

    double ber() const
    {
        return desired_bits_total == 0 ? 0.0
                                       : static_cast<double>(desired_bit_errors) /
                                             static_cast<double>(desired_bits_total);
    }
};

SdmaReceiverReport receive_sdma_frame(const SdmaFrame& frame, const SdmaFrameConfig& config,
                                      ReceiverMode mode);

/// generate_sdma_frame followed by receive_sdma_frame.
SdmaReceiverReport run_sdma_frame(const SdmaFrameConfig& config, ReceiverMode mode,
                                  std::uint64_t frame_seed);

}  // namespace ksamc
