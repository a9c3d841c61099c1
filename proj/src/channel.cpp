#include "ksamc/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace ksamc {

NoiseParams NoiseParams::from_sigma_sq(double sigma_sq)
{
    if (!(sigma_sq >= 0.0))
        throw std::invalid_argument("noise variance must be nonnegative");
    return NoiseParams(sigma_sq);
}

NoiseParams NoiseParams::from_snr_db(double snr_db) { return NoiseParams(snr_db_to_sigma_sq(snr_db)); }

double NoiseParams::sigma() const { return std::sqrt(sigma_sq_); }

double NoiseParams::snr_db() const { return sigma_sq_to_snr_db(sigma_sq_); }

double snr_db_to_sigma_sq(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

double sigma_sq_to_snr_db(double sigma_sq) { return -10.0 * std::log10(sigma_sq); }

std::vector<Complex> awgn_apply(std::span<const Complex> symbols, double sigma_sq, Rng& rng)
{
    if (!(sigma_sq >= 0.0))
        throw std::invalid_argument("noise variance must be nonnegative");
    std::vector<Complex> out(symbols.begin(), symbols.end());
    if (sigma_sq == 0.0)
        return out;
    for (Complex& y : out)
        y += rng.complex_gaussian(sigma_sq);
    return out;
}

SdmaChannelSet draw_sdma_channels(std::size_t num_subcarriers, Rng& rng)
{
    if (num_subcarriers == 0)
        throw std::invalid_argument("need at least one subcarrier");
    SdmaChannelSet set;
    set.h.resize(num_subcarriers);
    set.g.resize(num_subcarriers);
    for (std::size_t l = 0; l < num_subcarriers; ++l) {
        set.h[l] = {rng.complex_gaussian(1.0), rng.complex_gaussian(1.0)};
        set.g[l] = {rng.complex_gaussian(1.0), rng.complex_gaussian(1.0)};
    }
    return set;
}

ReceivedFrame sdma_transmit(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& x_prime,
                            const SdmaChannelSet& channels, double sigma_sq, Rng& rng)
{
    if (!(sigma_sq >= 0.0))
        throw std::invalid_argument("noise variance must be nonnegative");
    const auto subcarriers = static_cast<std::size_t>(x.rows());
    const auto words = static_cast<std::size_t>(x.cols());
    if (x_prime.rows() != x.rows() || x_prime.cols() != x.cols() ||
        channels.h.size() != subcarriers || channels.g.size() != subcarriers)
        throw std::invalid_argument("sdma_transmit: dimension mismatch");

    ReceivedFrame frame(subcarriers, words);
    for (std::size_t l = 0; l < subcarriers; ++l) {
        for (std::size_t n = 0; n < words; ++n) {
            const auto i = static_cast<Eigen::Index>(l), j = static_cast<Eigen::Index>(n);
            Eigen::Vector2cd y = channels.h[l] * x(i, j) + channels.g[l] * x_prime(i, j);
            if (sigma_sq > 0.0) {
                y(0) += rng.complex_gaussian(sigma_sq);
                y(1) += rng.complex_gaussian(sigma_sq);
            }
            frame.at(l, n) = y;
        }
    }
    return frame;
}

}  // namespace ksamc
