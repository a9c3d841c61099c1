#include "ksamc/random.hpp"

#include <bit>
#include <cmath>

namespace ksamc {

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                          std::initializer_list<std::uint64_t> keys)
{
    std::uint64_t h = mix64(seed ^ mix64(static_cast<std::uint64_t>(stream)));
    for (std::uint64_t k : keys)
        h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
    return h;
}

std::uint64_t key_of(double value)
{
    if (value == 0.0)
        value = 0.0;  // fold -0.0
    return std::bit_cast<std::uint64_t>(value);
}

std::complex<double> Rng::complex_gaussian(double variance)
{
    const double s = std::sqrt(variance / 2.0);
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {s * re, s * im};
}

std::uint64_t Rng::uniform_index(std::uint64_t n)
{
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
}

}  // namespace ksamc
