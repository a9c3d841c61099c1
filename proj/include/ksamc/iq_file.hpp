#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "ksamc/constellation.hpp"

namespace ksamc {

/**
 * Reads complex baseband samples. Files ending in ".csv" hold one "re,im"
 * row per sample (an optional non-numeric header line is skipped); anything
 * else is interleaved little-endian float64 re/im pairs. Throws IoError.
 */
std::vector<Complex> read_iq_file(const std::filesystem::path& path);

/// Writes the binary or CSV layout read by read_iq_file, chosen by extension.
void write_iq_file(const std::filesystem::path& path, std::span<const Complex> samples);

}  // namespace ksamc
