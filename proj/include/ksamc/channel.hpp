#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ksamc/constellation.hpp"
#include "ksamc/random.hpp"

namespace ksamc {

/// Noise level against unit-energy symbols: SNR = 1 / sigma^2.
class NoiseParams {
public:
    static NoiseParams from_sigma_sq(double sigma_sq);
    static NoiseParams from_snr_db(double snr_db);

    double sigma_sq() const { return sigma_sq_; }
    double sigma() const;
    double snr_linear() const { return 1.0 / sigma_sq_; }
    double snr_db() const;

private:
    explicit NoiseParams(double sigma_sq) : sigma_sq_(sigma_sq) {}
    double sigma_sq_;
};

double snr_db_to_sigma_sq(double snr_db);
double sigma_sq_to_snr_db(double sigma_sq);

/// y_n = x_n + w_n with w_n ~ CN(0, sigma_sq). Throws on negative sigma_sq.
std::vector<Complex> awgn_apply(std::span<const Complex> symbols, double sigma_sq, Rng& rng);

/// Per-subcarrier channel vectors of the desired user (h) and interferer (g).
struct SdmaChannelSet {
    std::vector<Eigen::Vector2cd> h;
    std::vector<Eigen::Vector2cd> g;

    std::size_t num_subcarriers() const { return h.size(); }
};

/// i.i.d. CN(0, 1) entries for every antenna, subcarrier and user.
SdmaChannelSet draw_sdma_channels(std::size_t num_subcarriers, Rng& rng);

/// Received 2-antenna samples, indexed (subcarrier, OFDM word).
class ReceivedFrame {
public:
    ReceivedFrame(std::size_t subcarriers, std::size_t words)
        : subcarriers_(subcarriers), words_(words), y_(subcarriers * words)
    {
    }

    std::size_t subcarriers() const { return subcarriers_; }
    std::size_t words() const { return words_; }
    Eigen::Vector2cd& at(std::size_t l, std::size_t n) { return y_[l * words_ + n]; }
    const Eigen::Vector2cd& at(std::size_t l, std::size_t n) const { return y_[l * words_ + n]; }

private:
    std::size_t subcarriers_;
    std::size_t words_;
    std::vector<Eigen::Vector2cd> y_;
};

/**
 * Y_l(n) = H_l X_l(n) + G_l X'_l(n) + W_l(n), with x and x_prime given as
 * P x N matrices (subcarrier, word) and W i.i.d. CN(0, sigma_sq) per antenna.
 * Throws std::invalid_argument on dimension mismatch or negative sigma_sq.
 */
ReceivedFrame sdma_transmit(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& x_prime,
                            const SdmaChannelSet& channels, double sigma_sq, Rng& rng);

}  // namespace ksamc
