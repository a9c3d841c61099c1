// ksamc: K-S modulation classification experiments and utilities.
//
//   ksamc <subcommand> [--config path] [--seed S] [--out results.csv] [flags]
//
// Exit codes: 0 success, 1 configuration error, 2 I/O error.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ksamc/cdf_model.hpp"
#include "ksamc/config.hpp"
#include "ksamc/experiments.hpp"
#include "ksamc/iq_file.hpp"

namespace {

constexpr int kConfigExit = 1;
constexpr int kIoExit = 2;

struct Options {
    std::string config_path;
    std::vector<std::string> sets;
    // flag name -> config key; values filled by CLI11
    std::map<std::string, std::string> values;
};

void add_flag(CLI::App* cmd, Options& opts, const std::string& flag, const std::string& key,
              const std::string& help)
{
    cmd->add_option_function<std::string>(
        flag, [&opts, key](const std::string& v) { opts.values[key] = v; }, help);
}

ksamc::ConfigMap gather(const Options& opts)
{
    ksamc::ConfigMap map;
    if (!opts.config_path.empty())
        map = ksamc::ConfigMap::load(opts.config_path);
    for (const auto& kv : opts.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ksamc::ConfigError("--set expects key=value, got '" + kv + "'");
        map.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [key, value] : opts.values)
        map.set(key, value);
    return map;
}

void emit_rows(const ksamc::ExperimentConfig& cfg, const std::vector<ksamc::ResultRow>& rows)
{
    if (!cfg.out) {
        ksamc::write_csv(rows, std::cout);
        return;
    }
    std::ofstream out(*cfg.out, std::ios::binary);
    if (!out)
        throw ksamc::IoError("cannot write " + cfg.out->string());
    ksamc::write_csv(rows, out);
    if (!out)
        throw ksamc::IoError("failed writing " + cfg.out->string());
}

int run(ksamc::ExperimentKind kind, const Options& opts)
{
    const auto cfg = ksamc::ExperimentConfig::from_map(kind, gather(opts));
    switch (kind) {
    case ksamc::ExperimentKind::BuildTable: {
        if (!cfg.out)
            throw ksamc::ConfigError("build-table needs --out <path>");
        const auto table = ksamc::build_table(cfg, cfg.granularity_db);
        ksamc::save_table(table, *cfg.out);
        std::cerr << "wrote " << table.formats().size() << " x " << table.snr_count() << " x "
                  << ksamc::CdfZGrid::kCount << " table to " << cfg.out->string() << '\n';
        return 0;
    }
    case ksamc::ExperimentKind::Classify: {
        const auto samples = ksamc::read_iq_file(*cfg.input);
        ksamc::classify_to_csv(cfg, samples, std::cout);
        return 0;
    }
    default:
        emit_rows(cfg, ksamc::run_experiment(cfg));
        return 0;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kolmogorov-Smirnov modulation classification simulator"};
    app.require_subcommand(1);

    Options opts;
    std::optional<ksamc::ExperimentKind> chosen;

    const std::vector<std::pair<ksamc::ExperimentKind, std::string>> commands = {
        {ksamc::ExperimentKind::PccVsSnr, "Pcc versus SNR (AWGN)"},
        {ksamc::ExperimentKind::PccVsOffset, "Pcc versus assumed-SNR offset"},
        {ksamc::ExperimentKind::PccVsSamples, "Pcc versus number of samples"},
        {ksamc::ExperimentKind::BerSweep, "BER of the OFDM-SDMA receivers versus SNR"},
        {ksamc::ExperimentKind::BuildTable, "Write a quantized CDF table file"},
        {ksamc::ExperimentKind::Classify, "Classify the samples in an IQ file"},
    };

    for (const auto& [kind, help] : commands) {
        auto* cmd = app.add_subcommand(std::string(ksamc::to_string(kind)), help);
        cmd->add_option("--config", opts.config_path, "key=value config file");
        cmd->add_option("--set", opts.sets, "override any config key (key=value)");
        add_flag(cmd, opts, "--seed", "seed", "64-bit experiment seed");
        add_flag(cmd, opts, "--out", "out", "output path (CSV, or table file for build-table)");
        add_flag(cmd, opts, "--trials", "trials", "trials (frames for ber-sweep) per point");
        add_flag(cmd, opts, "--workers", "workers", "worker threads");
        add_flag(cmd, opts, "--candidates", "candidates", "e.g. QAM4,QAM16,QAM64");
        add_flag(cmd, opts, "--table", "table", "CDF table file for the ks-table method");
        add_flag(cmd, opts, "--snr-db", "snr_db", "fixed (or assumed, for classify) SNR in dB");
        switch (kind) {
        case ksamc::ExperimentKind::PccVsSnr:
        case ksamc::ExperimentKind::PccVsOffset:
        case ksamc::ExperimentKind::PccVsSamples:
            add_flag(cmd, opts, "--methods", "methods", "subset of ks,ks-table,cumulant");
            add_flag(cmd, opts, "--n-samples", "n_samples", "complex samples per trial");
            add_flag(cmd, opts, "--snr-grid-db", "snr_grid_db", "list or start:step:stop");
            add_flag(cmd, opts, "--offset-grid-db", "offset_grid_db", "list or start:step:stop");
            add_flag(cmd, opts, "--sample-size-grid", "sample_size_grid", "list of N");
            add_flag(cmd, opts, "--table-granularities-db", "table_granularities_db",
                     "SNR quantization steps for ks-table");
            break;
        case ksamc::ExperimentKind::BerSweep:
            add_flag(cmd, opts, "--snr-grid-db", "snr_grid_db", "list or start:step:stop");
            add_flag(cmd, opts, "--desired", "desired", "desired user's format");
            add_flag(cmd, opts, "--modes", "modes", "subset of mmse-only,ic-ks,ic-cumulant,ideal");
            add_flag(cmd, opts, "--subcarriers", "subcarriers", "subcarriers per OFDM symbol");
            add_flag(cmd, opts, "--group-size", "group_size", "subcarriers per classification group");
            break;
        case ksamc::ExperimentKind::BuildTable:
            add_flag(cmd, opts, "--granularity-db", "granularity_db", "SNR grid step");
            add_flag(cmd, opts, "--snr-min-db", "table_snr_min_db", "lowest stored SNR");
            add_flag(cmd, opts, "--snr-max-db", "table_snr_max_db", "highest stored SNR");
            break;
        case ksamc::ExperimentKind::Classify:
            add_flag(cmd, opts, "--method", "method", "ks, ks-table or cumulant");
            add_flag(cmd, opts, "--input", "input", "IQ file (.csv re,im rows or float64 pairs)");
            add_flag(cmd, opts, "--granularity-db", "granularity_db",
                     "table step when no --table is given");
            break;
        }
        cmd->callback([&chosen, kind = kind] { chosen = kind; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigExit;
    }

    try {
        return run(*chosen, opts);
    } catch (const ksamc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigExit;
    } catch (const ksamc::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIoExit;
    } catch (const ksamc::TableFormatError& e) {
        std::cerr << "table error: " << e.what() << '\n';
        return kIoExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigExit;
    }
}
