#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace ksamc {

/// Independent substreams derived from one experiment seed.
enum class Stream : std::uint64_t {
    Format = 1,
    Symbols = 2,
    Noise = 3,
    Channels = 4,
    Interferer = 5,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/**
 * Derives a substream seed from the experiment seed, a stream tag and any
 * number of integer keys (trial index, sweep point, ...). Chained mix64 over
 * the inputs; the mapping is part of the reproducibility contract.
 */
std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                          std::initializer_list<std::uint64_t> keys = {});

/// Bit pattern of a double, for use as a derive_seed key.
std::uint64_t key_of(double value);

/// Seeded random source: mt19937_64 with Gaussian and uniform helpers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double gaussian() { return normal_(engine_); }

    /// Circularly symmetric complex Gaussian with E|w|^2 = variance.
    std::complex<double> complex_gaussian(double variance);

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ksamc
