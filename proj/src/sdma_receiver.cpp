#include "ksamc/sdma_receiver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ksamc/classifiers.hpp"
#include "ksamc/random.hpp"

namespace ksamc {

MmseFilter mmse_design(const Eigen::Vector2cd& h, const Eigen::Vector2cd& g, double sigma_sq)
{
    if (!(sigma_sq > 0.0))
        throw std::invalid_argument("mmse_design needs sigma_sq > 0");
    const Eigen::Matrix2cd cov = h * h.adjoint() + sigma_sq * Eigen::Matrix2cd::Identity();
    const Eigen::Vector2cd w = cov.inverse() * g;
    const Complex gain = g.dot(w);  // g^H cov^-1 g, real and >= 0
    if (std::abs(gain) < 1e-300)
        throw std::domain_error("mmse_design: extracted user's channel is zero");

    MmseFilter f;
    f.alpha = 1.0 / gain;
    f.m = f.alpha * w;
    f.residual_var = std::norm(f.m.dot(h)) + sigma_sq * f.m.squaredNorm();
    return f;
}

Complex mmse_output(const MmseFilter& filter, const Eigen::Vector2cd& y)
{
    return filter.m.dot(y);
}

Modulation classify_interferer(std::span<const Complex> gamma_primes, double residual_var,
                               InterfererClassifier method,
                               std::span<const Modulation> candidates,
                               const QuantizedCdfTable* table)
{
    if (gamma_primes.empty())
        throw std::invalid_argument("classify_interferer: empty subcarrier group");
    switch (method) {
    case InterfererClassifier::KsExact:
        return classify_ks_exact(gamma_primes, std::sqrt(residual_var), candidates).decided;
    case InterfererClassifier::KsTable:
        if (table == nullptr)
            throw std::invalid_argument("classify_interferer: table method without a table");
        return classify_ks_table(gamma_primes, sigma_sq_to_snr_db(residual_var), *table,
                                 candidates)
            .decided;
    case InterfererClassifier::Cumulant:
        return classify_cumulant(gamma_primes, residual_var, candidates);
    }
    throw std::logic_error("unhandled interferer classifier");
}

CancellationOutput cancel_and_demod(const Eigen::Vector2cd& y, const Eigen::Vector2cd& h,
                                    const Eigen::Vector2cd& g, Complex x_prime_hat,
                                    const Constellation& desired)
{
    const double energy = h.squaredNorm();
    if (energy < 1e-12)
        throw std::domain_error("cancel_and_demod: desired channel is degenerate");
    const Complex beta = h.dot(y - g * x_prime_hat);
    return {beta, demodulate_min_distance(beta / energy, desired)};
}

std::string_view to_string(ReceiverMode mode)
{
    switch (mode) {
    case ReceiverMode::MmseOnly: return "mmse-only";
    case ReceiverMode::IcKs: return "ic-ks";
    case ReceiverMode::IcCumulant: return "ic-cumulant";
    case ReceiverMode::Ideal: return "ideal";
    }
    return "?";
}

ReceiverMode parse_receiver_mode(std::string_view name)
{
    for (auto m : {ReceiverMode::MmseOnly, ReceiverMode::IcKs, ReceiverMode::IcCumulant,
                   ReceiverMode::Ideal})
        if (name == to_string(m))
            return m;
    throw std::invalid_argument("unknown receiver mode '" + std::string(name) + "'");
}

void SdmaFrameConfig::validate() const
{
    if (subcarriers == 0 || words == 0)
        throw std::invalid_argument("frame needs at least one subcarrier and one word");
    if (group_size > subcarriers)
        throw std::invalid_argument("group size exceeds the number of subcarriers");
    if (!(interferer_power >= 0.0))
        throw std::invalid_argument("interferer power must be nonnegative");
    if (!(sigma_sq >= 0.0))
        throw std::invalid_argument("noise variance must be nonnegative");
    if (candidates.empty())
        throw std::invalid_argument("candidate set is empty");
    if (use_table && table == nullptr)
        throw std::invalid_argument("table classification requested without a table");
}

SdmaFrame generate_sdma_frame(const SdmaFrameConfig& config, std::uint64_t frame_seed)
{
    config.validate();
    const auto P = config.subcarriers, N = config.words;

    SdmaFrame frame;
    Rng channel_rng(derive_seed(frame_seed, Stream::Channels));
    frame.channels = draw_sdma_channels(P, channel_rng);
    if (config.interferer_power != 1.0) {
        const double scale = std::sqrt(config.interferer_power);
        for (auto& g : frame.channels.g)
            g *= scale;
    }

    const auto& desired = constellation_points(config.desired);
    const auto& interferer = constellation_points(config.interferer);
    Rng symbol_rng(derive_seed(frame_seed, Stream::Symbols));
    frame.desired_indices.resize(P * N);
    frame.interferer_indices.resize(P * N);
    frame.x.resize(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(N));
    frame.x_prime.resize(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(N));
    for (std::size_t l = 0; l < P; ++l) {
        for (std::size_t n = 0; n < N; ++n) {
            const auto k = l * N + n;
            frame.desired_indices[k] = symbol_rng.uniform_index(desired.size());
            frame.interferer_indices[k] = symbol_rng.uniform_index(interferer.size());
            const auto i = static_cast<Eigen::Index>(l), j = static_cast<Eigen::Index>(n);
            frame.x(i, j) = desired.point(frame.desired_indices[k]);
            frame.x_prime(i, j) = interferer.point(frame.interferer_indices[k]);
        }
    }

    Rng noise_rng(derive_seed(frame_seed, Stream::Noise));
    frame.y = sdma_transmit(frame.x, frame.x_prime, frame.channels, config.sigma_sq, noise_rng);
    return frame;
}

SdmaReceiverReport receive_sdma_frame(const SdmaFrame& frame, const SdmaFrameConfig& config,
                                      ReceiverMode mode)
{
    config.validate();
    const auto P = frame.y.subcarriers(), N = frame.y.words();
    const auto& desired = constellation_points(config.desired);
    const auto& channels = frame.channels;

    SdmaReceiverReport report;
    report.interferer_true = config.interferer;
    report.desired_bits_total = P * N * bits_per_symbol(config.desired);

    auto count_errors = [&](std::size_t l, std::size_t n, std::size_t decided) {
        report.desired_bit_errors += bit_errors(desired, frame.desired_indices[l * N + n], decided);
    };

    if (mode == ReceiverMode::MmseOnly) {
        for (std::size_t l = 0; l < P; ++l) {
            const MmseFilter f = mmse_design(channels.g[l], channels.h[l], config.sigma_sq);
            for (std::size_t n = 0; n < N; ++n)
                count_errors(l, n, demodulate_min_distance(mmse_output(f, frame.y.at(l, n)), desired));
        }
        return report;
    }

    if (mode == ReceiverMode::Ideal) {
        for (std::size_t l = 0; l < P; ++l)
            for (std::size_t n = 0; n < N; ++n) {
                const Complex x_prime = frame.x_prime(static_cast<Eigen::Index>(l),
                                                      static_cast<Eigen::Index>(n));
                count_errors(l, n,
                             cancel_and_demod(frame.y.at(l, n), channels.h[l], channels.g[l],
                                              x_prime, desired)
                                 .decided);
            }
        return report;
    }

    // interference cancellation: extract, classify, demodulate, subtract
    std::vector<Complex> gamma(P * N);
    std::vector<double> residual(P);
    for (std::size_t l = 0; l < P; ++l) {
        const MmseFilter f = mmse_design(channels.h[l], channels.g[l], config.sigma_sq);
        residual[l] = f.residual_var;
        for (std::size_t n = 0; n < N; ++n)
            gamma[l * N + n] = mmse_output(f, frame.y.at(l, n));
    }

    const InterfererClassifier method =
        mode == ReceiverMode::IcCumulant
            ? InterfererClassifier::Cumulant
            : (config.use_table ? InterfererClassifier::KsTable : InterfererClassifier::KsExact);
    const auto group = config.effective_group_size();
    for (std::size_t first = 0; first < P; first += group) {
        const std::size_t last = std::min(first + group, P);
        double mean_residual = 0.0;
        for (std::size_t l = first; l < last; ++l)
            mean_residual += residual[l];
        mean_residual /= static_cast<double>(last - first);

        const std::span<const Complex> samples(gamma.data() + first * N, (last - first) * N);
        Modulation decided;
        try {
            decided = classify_interferer(samples, mean_residual, method, config.candidates,
                                          config.table);
        } catch (const DegenerateInputError&) {
            decided = canonical_candidates(config.candidates).front();
        }
        report.classified.push_back(decided);
        if (decided != config.interferer)
            ++report.misclassified_groups;

        const auto& guess = constellation_points(decided);
        for (std::size_t l = first; l < last; ++l) {
            for (std::size_t n = 0; n < N; ++n) {
                const Complex x_hat = guess.point(demodulate_min_distance(gamma[l * N + n], guess));
                const Complex x_true = frame.x_prime(static_cast<Eigen::Index>(l),
                                                     static_cast<Eigen::Index>(n));
                if (std::abs(x_hat - x_true) > 1e-12)
                    ++report.interferer_symbol_errors;
                count_errors(l, n,
                             cancel_and_demod(frame.y.at(l, n), channels.h[l], channels.g[l],
                                              x_hat, desired)
                                 .decided);
            }
        }
    }
    return report;
}

SdmaReceiverReport run_sdma_frame(const SdmaFrameConfig& config, ReceiverMode mode,
                                  std::uint64_t frame_seed)
{
    return receive_sdma_frame(generate_sdma_frame(config, frame_seed), config, mode);
}

}  // namespace ksamc
