#include "ksamc/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "ksamc/channel.hpp"
#include "ksamc/classifiers.hpp"
#include "ksamc/random.hpp"

namespace ksamc {

namespace {

const std::set<std::string> kKnownKeys = {
    "seed", "trials", "workers", "n_samples", "snr_db", "snr_grid_db", "offset_grid_db",
    "sample_size_grid", "methods", "method", "candidates", "ks_sides", "table_granularities_db",
    "table", "table_snr_min_db", "table_snr_max_db", "subcarriers", "ofdm_words", "group_size",
    "desired", "modes", "interferer_power", "sdma_classifier", "granularity_db", "input", "out"};

struct MethodSpec {
    std::string label;
    MethodKind kind;
    const QuantizedCdfTable* table = nullptr;
};

/// Method specs for a Pcc sweep; ks-table expands over granularities unless
/// a table file is given. `tables` owns the tables the specs point into.
std::vector<MethodSpec> resolve_methods(const ExperimentConfig& cfg,
                                        std::deque<QuantizedCdfTable>& tables)
{
    std::vector<MethodSpec> specs;
    for (MethodKind m : cfg.methods) {
        if (m != MethodKind::KsTable) {
            specs.push_back({std::string(to_string(m)), m});
            continue;
        }
        if (cfg.table_path) {
            tables.push_back(load_table(*cfg.table_path));
            specs.push_back({"ks-table", m, &tables.back()});
            continue;
        }
        for (double g : cfg.table_granularities_db) {
            tables.push_back(build_table(cfg, g));
            specs.push_back({"ks-table-" + format_number(g) + "dB", m, &tables.back()});
        }
    }
    return specs;
}

std::optional<Modulation> decide(const MethodSpec& spec, const ExperimentConfig& cfg,
                                 std::span<const Complex> samples, double assumed_snr_db)
{
    const double sigma_sq = snr_db_to_sigma_sq(assumed_snr_db);
    switch (spec.kind) {
    case MethodKind::Ks:
        return classify_ks_exact(samples, std::sqrt(sigma_sq), cfg.candidates, cfg.ks_sides)
            .decided;
    case MethodKind::KsTable:
        return classify_ks_table(samples, assumed_snr_db, *spec.table, cfg.candidates,
                                 cfg.ks_sides)
            .decided;
    case MethodKind::Cumulant:
        try {
            return classify_cumulant(samples, sigma_sq, cfg.candidates);
        } catch (const DegenerateInputError&) {
            return std::nullopt;  // scored as a miss
        }
    }
    return std::nullopt;
}

/// Correct-decision counts per method at one sweep point.
std::vector<std::size_t> count_correct(const ExperimentConfig& cfg,
                                       const std::vector<MethodSpec>& specs, double true_snr_db,
                                       double assumed_snr_db, std::size_t n)
{
    const std::size_t S = specs.size();
    std::vector<unsigned char> hits(cfg.trials * S, 0);
    parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
        const AwgnTrial trial = make_awgn_trial(cfg.seed, cfg.candidates, true_snr_db, n, t);
        for (std::size_t j = 0; j < S; ++j)
            hits[t * S + j] = decide(specs[j], cfg, trial.samples, assumed_snr_db) == trial.format;
    });
    std::vector<std::size_t> counts(S, 0);
    for (std::size_t t = 0; t < cfg.trials; ++t)
        for (std::size_t j = 0; j < S; ++j)
            counts[j] += hits[t * S + j];
    return counts;
}

void append_pcc_rows(std::vector<ResultRow>& rows, const ExperimentConfig& cfg,
                     const std::vector<MethodSpec>& specs, const std::vector<std::size_t>& counts,
                     double variable)
{
    for (std::size_t j = 0; j < specs.size(); ++j)
        rows.push_back({std::string(to_string(cfg.experiment)), specs[j].label, variable, "pcc",
                        static_cast<double>(counts[j]) / static_cast<double>(cfg.trials),
                        cfg.trials, cfg.seed});
}

void require_kind(const ExperimentConfig& cfg, ExperimentKind kind)
{
    if (cfg.experiment != kind)
        throw ConfigError("config is for '" + std::string(to_string(cfg.experiment)) +
                          "', expected '" + std::string(to_string(kind)) + "'");
}

}  // namespace

std::string_view to_string(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::PccVsSnr: return "pcc-vs-snr";
    case ExperimentKind::PccVsOffset: return "pcc-vs-offset";
    case ExperimentKind::PccVsSamples: return "pcc-vs-samples";
    case ExperimentKind::BerSweep: return "ber-sweep";
    case ExperimentKind::BuildTable: return "build-table";
    case ExperimentKind::Classify: return "classify";
    }
    return "?";
}

ExperimentKind parse_experiment(std::string_view name)
{
    for (auto k : {ExperimentKind::PccVsSnr, ExperimentKind::PccVsOffset,
                   ExperimentKind::PccVsSamples, ExperimentKind::BerSweep,
                   ExperimentKind::BuildTable, ExperimentKind::Classify})
        if (name == to_string(k))
            return k;
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

std::string_view to_string(MethodKind method)
{
    switch (method) {
    case MethodKind::Ks: return "ks";
    case MethodKind::KsTable: return "ks-table";
    case MethodKind::Cumulant: return "cumulant";
    }
    return "?";
}

MethodKind parse_method(std::string_view name)
{
    for (auto m : {MethodKind::Ks, MethodKind::KsTable, MethodKind::Cumulant})
        if (name == to_string(m))
            return m;
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

ExperimentConfig ExperimentConfig::from_map(ExperimentKind kind, const ConfigMap& map)
{
    for (const auto& key : map.keys())
        if (!kKnownKeys.count(key))
            throw ConfigError("unknown config key '" + key + "'");

    ExperimentConfig c;
    c.experiment = kind;
    c.seed = map.get_uint("seed", 1);
    c.trials = map.get_uint("trials", kind == ExperimentKind::BerSweep ? 200 : 2000);
    c.workers = map.get_uint("workers", 1);
    c.n_samples = map.get_uint("n_samples", 100);
    c.snr_db = map.get_double("snr_db", kind == ExperimentKind::PccVsSamples ? 14.0 : 15.0);
    c.snr_grid_db = map.get_doubles("snr_grid_db", parse_double_list("-5:1:25", "snr_grid_db"));
    c.offset_grid_db =
        map.get_doubles("offset_grid_db", parse_double_list("-6:1:6", "offset_grid_db"));
    for (double v : map.get_doubles("sample_size_grid", {20, 50, 100, 200, 500, 1000})) {
        if (!(v >= 1.0) || v != std::floor(v))
            throw ConfigError("sample_size_grid entries must be positive integers");
        c.sample_size_grid.push_back(static_cast<std::size_t>(v));
    }

    std::vector<std::string> default_methods = {"ks", "ks-table", "cumulant"};
    if (kind == ExperimentKind::Classify)
        default_methods = {"ks"};
    auto method_names = map.get_strings("methods", default_methods);
    if (auto single = map.get("method"))
        method_names = split_list(*single);
    for (const auto& m : method_names)
        c.methods.push_back(parse_method(m));

    try {
        c.candidates = parse_modulation_list(map.get_string("candidates", "QAM4,QAM16,QAM64"));
        c.desired = parse_modulation(map.get_string("desired", "QAM16"));
        for (const auto& m : map.get_strings("modes", {"mmse-only", "ic-ks", "ic-cumulant", "ideal"}))
            c.modes.push_back(parse_receiver_mode(m));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const auto sides = map.get_string("ks_sides", "both");
    if (sides == "both")
        c.ks_sides = JumpSides::Both;
    else if (sides == "upper")
        c.ks_sides = JumpSides::UpperOnly;
    else
        throw ConfigError("ks_sides must be 'both' or 'upper'");

    c.table_granularities_db = map.get_doubles("table_granularities_db", {1.0, 3.0, 5.0});
    if (auto t = map.get("table"))
        c.table_path = *t;
    c.table_snr_min_db = map.get_double("table_snr_min_db", -15.0);
    c.table_snr_max_db = map.get_double("table_snr_max_db", 40.0);

    c.subcarriers = map.get_uint("subcarriers", 512);
    c.ofdm_words = map.get_uint("ofdm_words", 1);
    c.group_size = map.get_uint("group_size", 0);
    c.interferer_power = map.get_double("interferer_power", 1.0);
    const auto sdma_classifier = map.get_string("sdma_classifier", "exact");
    if (sdma_classifier != "exact" && sdma_classifier != "table")
        throw ConfigError("sdma_classifier must be 'exact' or 'table'");
    c.sdma_use_table = sdma_classifier == "table";

    c.granularity_db = map.get_double("granularity_db", 1.0);
    if (auto p = map.get("input"))
        c.input = *p;
    if (auto p = map.get("out"))
        c.out = *p;

    c.validate();
    return c;
}

void ExperimentConfig::validate() const
{
    if (trials < 1)
        throw ConfigError("trials must be at least 1");
    if (workers < 1)
        throw ConfigError("workers must be at least 1");
    if (n_samples < 1)
        throw ConfigError("n_samples must be at least 1");
    if (candidates.empty())
        throw ConfigError("candidate set is empty");
    if (methods.empty())
        throw ConfigError("no classification method selected");
    for (double g : table_granularities_db)
        if (!(g > 0.0))
            throw ConfigError("table granularities must be positive");
    if (!(granularity_db > 0.0))
        throw ConfigError("granularity_db must be positive");
    if (!(table_snr_max_db >= table_snr_min_db))
        throw ConfigError("table SNR range is reversed");
    if (table_path && !std::filesystem::exists(*table_path))
        throw ConfigError("table file " + table_path->string() + " does not exist");

    const bool uses_table_sweep =
        std::find(methods.begin(), methods.end(), MethodKind::KsTable) != methods.end() ||
        (experiment == ExperimentKind::BerSweep && sdma_use_table);
    if (uses_table_sweep && !table_path && table_granularities_db.empty())
        throw ConfigError("table method needs table_granularities_db or a table file");

    switch (experiment) {
    case ExperimentKind::PccVsSnr:
        if (snr_grid_db.empty())
            throw ConfigError("snr_grid_db is empty");
        break;
    case ExperimentKind::PccVsOffset:
        if (offset_grid_db.empty())
            throw ConfigError("offset_grid_db is empty");
        break;
    case ExperimentKind::PccVsSamples:
        if (sample_size_grid.empty())
            throw ConfigError("sample_size_grid is empty");
        break;
    case ExperimentKind::BerSweep:
        if (snr_grid_db.empty())
            throw ConfigError("snr_grid_db is empty");
        if (modes.empty())
            throw ConfigError("no receiver modes selected");
        if (subcarriers < 1 || ofdm_words < 1)
            throw ConfigError("frame needs at least one subcarrier and one OFDM word");
        if (group_size > subcarriers)
            throw ConfigError("group_size exceeds subcarriers");
        if (!(interferer_power >= 0.0))
            throw ConfigError("interferer_power must be nonnegative");
        break;
    case ExperimentKind::BuildTable:
        break;
    case ExperimentKind::Classify:
        if (!input)
            throw ConfigError("classify needs an input IQ file");
        break;
    }
}

AwgnTrial make_awgn_trial(std::uint64_t seed, std::span<const Modulation> candidates,
                          double snr_db, std::size_t n, std::size_t trial)
{
    const std::uint64_t snr_key = key_of(snr_db);
    Rng format_rng(derive_seed(seed, Stream::Format, {snr_key, n, trial}));
    Rng symbol_rng(derive_seed(seed, Stream::Symbols, {snr_key, n, trial}));
    Rng noise_rng(derive_seed(seed, Stream::Noise, {snr_key, n, trial}));

    const Modulation format = candidates[format_rng.uniform_index(candidates.size())];
    const auto& points = constellation_points(format);
    std::vector<std::size_t> indices(n);
    for (auto& i : indices)
        i = symbol_rng.uniform_index(points.size());
    const auto symbols = modulate(indices, points);
    return {format, awgn_apply(symbols, snr_db_to_sigma_sq(snr_db), noise_rng)};
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn)
{
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers)
                    fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

std::vector<ResultRow> run_pcc_vs_snr(const ExperimentConfig& config)
{
    require_kind(config, ExperimentKind::PccVsSnr);
    std::deque<QuantizedCdfTable> tables;
    const auto specs = resolve_methods(config, tables);
    std::vector<ResultRow> rows;
    for (double snr : config.snr_grid_db)
        append_pcc_rows(rows, config, specs, count_correct(config, specs, snr, snr, config.n_samples),
                        snr);
    return rows;
}

std::vector<ResultRow> run_pcc_vs_offset(const ExperimentConfig& config)
{
    require_kind(config, ExperimentKind::PccVsOffset);
    std::deque<QuantizedCdfTable> tables;
    const auto specs = resolve_methods(config, tables);
    std::vector<ResultRow> rows;
    for (double offset : config.offset_grid_db)
        append_pcc_rows(rows, config, specs,
                        count_correct(config, specs, config.snr_db, config.snr_db + offset,
                                      config.n_samples),
                        offset);
    return rows;
}

std::vector<ResultRow> run_pcc_vs_samples(const ExperimentConfig& config)
{
    require_kind(config, ExperimentKind::PccVsSamples);
    std::deque<QuantizedCdfTable> tables;
    const auto specs = resolve_methods(config, tables);
    std::vector<ResultRow> rows;
    for (std::size_t n : config.sample_size_grid)
        append_pcc_rows(rows, config, specs,
                        count_correct(config, specs, config.snr_db, config.snr_db, n),
                        static_cast<double>(n));
    return rows;
}

std::vector<ResultRow> run_ber_sweep(const ExperimentConfig& config)
{
    require_kind(config, ExperimentKind::BerSweep);
    std::optional<QuantizedCdfTable> table;
    if (config.sdma_use_table)
        table = config.table_path ? load_table(*config.table_path)
                                  : build_table(config, config.table_granularities_db.front());

    const std::size_t M = config.modes.size();
    std::vector<ResultRow> rows;
    for (double snr : config.snr_grid_db) {
        std::vector<std::size_t> errors(config.trials * M, 0);
        std::vector<std::size_t> bits(config.trials * M, 0);
        parallel_for(config.trials, config.workers, [&](std::size_t f) {
            SdmaFrameConfig frame_cfg;
            frame_cfg.subcarriers = config.subcarriers;
            frame_cfg.words = config.ofdm_words;
            frame_cfg.group_size = config.group_size;
            frame_cfg.desired = config.desired;
            frame_cfg.interferer_power = config.interferer_power;
            frame_cfg.sigma_sq = snr_db_to_sigma_sq(snr);
            frame_cfg.candidates = config.candidates;
            frame_cfg.use_table = config.sdma_use_table;
            frame_cfg.table = table ? &*table : nullptr;

            Rng pick(derive_seed(config.seed, Stream::Interferer, {key_of(snr), f}));
            frame_cfg.interferer = config.candidates[pick.uniform_index(config.candidates.size())];

            const auto frame = generate_sdma_frame(
                frame_cfg, derive_seed(config.seed, Stream::Channels, {key_of(snr), f}));
            for (std::size_t j = 0; j < M; ++j) {
                const auto report = receive_sdma_frame(frame, frame_cfg, config.modes[j]);
                errors[f * M + j] = report.desired_bit_errors;
                bits[f * M + j] = report.desired_bits_total;
            }
        });
        for (std::size_t j = 0; j < M; ++j) {
            std::size_t e = 0, b = 0;
            for (std::size_t f = 0; f < config.trials; ++f) {
                e += errors[f * M + j];
                b += bits[f * M + j];
            }
            rows.push_back({"ber-sweep", std::string(to_string(config.modes[j])), snr, "ber",
                            static_cast<double>(e) / static_cast<double>(b), config.trials,
                            config.seed});
        }
    }
    return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config)
{
    switch (config.experiment) {
    case ExperimentKind::PccVsSnr: return run_pcc_vs_snr(config);
    case ExperimentKind::PccVsOffset: return run_pcc_vs_offset(config);
    case ExperimentKind::PccVsSamples: return run_pcc_vs_samples(config);
    case ExperimentKind::BerSweep: return run_ber_sweep(config);
    default: break;
    }
    throw ConfigError("'" + std::string(to_string(config.experiment)) +
                      "' is not a sweep experiment");
}

QuantizedCdfTable build_table(const ExperimentConfig& config, double granularity_db)
{
    const auto grid =
        anchored_snr_grid(config.table_snr_min_db, config.table_snr_max_db, granularity_db);
    return build_cdf_table(config.candidates, grid, granularity_db);
}

QuantizedCdfTable load_table(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read table file " + path.string());
    return deserialize_table(in);
}

void save_table(const QuantizedCdfTable& table, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write table file " + path.string());
    serialize_table(table, out);
    if (!out)
        throw IoError("failed writing table file " + path.string());
}

std::string format_number(double v)
{
    if (v == 0.0)
        v = 0.0;
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_csv(std::span<const ResultRow> rows, std::ostream& out)
{
    std::vector<ResultRow> sorted(rows.begin(), rows.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.method != b.method)
            return a.method < b.method;
        return a.variable < b.variable;
    });
    out << "experiment,method,variable,value,metric,trials,seed\n";
    for (const auto& r : sorted)
        out << r.experiment << ',' << r.method << ',' << format_number(r.variable) << ','
            << format_number(r.value) << ',' << r.metric << ',' << r.trials << ',' << r.seed
            << '\n';
}

std::string to_csv(std::span<const ResultRow> rows)
{
    std::ostringstream out;
    write_csv(rows, out);
    return std::move(out).str();
}

void classify_to_csv(const ExperimentConfig& config, std::span<const Complex> samples,
                     std::ostream& out)
{
    const MethodKind method = config.methods.front();
    const double sigma_sq = snr_db_to_sigma_sq(config.snr_db);
    out << "method,candidate,statistic,alpha_hat,soft,decided\n";

    if (method == MethodKind::Cumulant) {
        const double c_hat = sample_c42(samples, sigma_sq);
        const Modulation decided = nearest_cumulant(c_hat, config.candidates);
        for (Modulation m : config.candidates)
            out << "cumulant," << to_string(m) << ','
                << format_number(std::abs(c_hat - theoretical_c42(m))) << ",,,"
                << (m == decided ? 1 : 0) << '\n';
        return;
    }

    ClassificationResult result;
    if (method == MethodKind::Ks) {
        result = classify_ks_exact(samples, std::sqrt(sigma_sq), config.candidates,
                                   config.ks_sides);
    } else {
        const QuantizedCdfTable table = config.table_path
                                            ? load_table(*config.table_path)
                                            : build_table(config, config.granularity_db);
        result = classify_ks_table(samples, config.snr_db, table, config.candidates,
                                   config.ks_sides);
    }
    for (Modulation m : config.candidates)
        out << to_string(method) << ',' << to_string(m) << ',' << format_number(result.d_hat.at(m))
            << ',' << format_number(result.alpha_hat.at(m)) << ','
            << format_number(result.soft.at(m)) << ',' << (m == result.decided ? 1 : 0) << '\n';
}

}  // namespace ksamc
