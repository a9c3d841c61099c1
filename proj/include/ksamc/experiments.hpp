#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ksamc/cdf_model.hpp"
#include "ksamc/config.hpp"
#include "ksamc/constellation.hpp"
#include "ksamc/ks_core.hpp"
#include "ksamc/sdma_receiver.hpp"

namespace ksamc {

enum class ExperimentKind { PccVsSnr, PccVsOffset, PccVsSamples, BerSweep, BuildTable, Classify };

std::string_view to_string(ExperimentKind kind);
/// Throws ConfigError on unknown names.
ExperimentKind parse_experiment(std::string_view name);

enum class MethodKind { Ks, KsTable, Cumulant };

std::string_view to_string(MethodKind method);
/// Throws ConfigError on unknown names.
MethodKind parse_method(std::string_view name);

/**
 * Parameters of one experiment run. Defaults reproduce the reference setups:
 * N = 100 samples, 2000 trials per point, SNR -5..25 dB, offsets -6..6 dB,
 * 512 subcarriers with one classification group per OFDM symbol.
 */
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::PccVsSnr;
    std::uint64_t seed = 1;
    std::size_t trials = 2000;
    std::size_t workers = 1;

    std::size_t n_samples = 100;
    double snr_db = 15.0;  ///< fixed true SNR (offset / sample sweeps) or assumed SNR (classify)
    std::vector<double> snr_grid_db;
    std::vector<double> offset_grid_db;
    std::vector<std::size_t> sample_size_grid;
    std::vector<MethodKind> methods;
    std::vector<Modulation> candidates;
    JumpSides ks_sides = JumpSides::Both;

    std::vector<double> table_granularities_db;
    std::optional<std::filesystem::path> table_path;
    double table_snr_min_db = -15.0;
    double table_snr_max_db = 40.0;

    std::size_t subcarriers = 512;
    std::size_t ofdm_words = 1;
    std::size_t group_size = 0;
    Modulation desired = Modulation::Qam16;
    std::vector<ReceiverMode> modes;
    double interferer_power = 1.0;
    bool sdma_use_table = false;

    double granularity_db = 1.0;  ///< build-table
    std::optional<std::filesystem::path> input;  ///< classify
    std::optional<std::filesystem::path> out;

    /// Defaults for `kind`, overridden by `map`. Unknown keys and invalid
    /// values raise ConfigError.
    static ExperimentConfig from_map(ExperimentKind kind, const ConfigMap& map);
    static ExperimentConfig defaults(ExperimentKind kind) { return from_map(kind, ConfigMap{}); }

    void validate() const;
};

struct ResultRow {
    std::string experiment;
    std::string method;
    double variable = 0.0;
    std::string metric;
    double value = 0.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

/// One AWGN classification trial: the true format and its received samples.
struct AwgnTrial {
    Modulation format;
    std::vector<Complex> samples;
};

/**
 * Draws the trial's format uniformly from `candidates`, then symbols and
 * noise, each from its own substream keyed by (seed, snr_db, n, trial).
 * Trials with equal keys are identical across experiments.
 */
AwgnTrial make_awgn_trial(std::uint64_t seed, std::span<const Modulation> candidates,
                          double snr_db, std::size_t n, std::size_t trial);

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

std::vector<ResultRow> run_pcc_vs_snr(const ExperimentConfig& config);
std::vector<ResultRow> run_pcc_vs_offset(const ExperimentConfig& config);
std::vector<ResultRow> run_pcc_vs_samples(const ExperimentConfig& config);
std::vector<ResultRow> run_ber_sweep(const ExperimentConfig& config);

/// Dispatches on config.experiment for the four sweep experiments.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

/// CDF table over the config's anchored SNR range at the given granularity.
QuantizedCdfTable build_table(const ExperimentConfig& config, double granularity_db);

/// Loads a table file. Throws IoError if unreadable, TableFormatError if malformed.
QuantizedCdfTable load_table(const std::filesystem::path& path);
void save_table(const QuantizedCdfTable& table, const std::filesystem::path& path);

/// Header plus rows sorted by (method, variable).
void write_csv(std::span<const ResultRow> rows, std::ostream& out);
std::string to_csv(std::span<const ResultRow> rows);

/// Classifies one sample block with the configured method (first entry of
/// config.methods) and prints a per-candidate CSV report.
void classify_to_csv(const ExperimentConfig& config, std::span<const Complex> samples,
                     std::ostream& out);

/// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace ksamc
