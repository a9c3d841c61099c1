// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ksamc/cdf_model.hpp"
#include "ksamc/channel.hpp"
#include "ksamc/classifiers.hpp"
#include "ksamc/experiments.hpp"
#include "ksamc/ks_core.hpp"
#include "ksamc/random.hpp"
#include "ksamc/sdma_receiver.hpp"
#include "oracles.hpp"

using namespace ksamc;

namespace {

const std::vector<Modulation> kAll(std::begin(kAllModulations), std::end(kAllModulations));

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what)
    {
        if (!cond) {
            ok = false;
            detail << "    violated: " << what << '\n';
        }
    }
};

double se(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

std::string fmt(double v, int prec = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

/// Rows keyed by method, then variable.
std::map<std::string, std::map<double, double>> by_method(const std::vector<ResultRow>& rows)
{
    std::map<std::string, std::map<double, double>> out;
    for (const auto& r : rows)
        out[r.method][r.variable] = r.value;
    return out;
}

ExperimentConfig config_for(ExperimentKind kind, const std::string& text)
{
    return ExperimentConfig::from_map(kind, ConfigMap::parse(text));
}

void criterion_cdf(Check& c)
{
    for (Modulation m : kAll)
        for (double snr : {5.0, 15.0, 25.0}) {
            Rng rng(derive_seed(101, Stream::Symbols, {key_of(snr), bits_per_symbol(m)}));
            const auto& pts = constellation_points(m);
            const double s2 = snr_db_to_sigma_sq(snr);
            std::vector<Complex> y(1'000'000);
            for (auto& v : y)
                v = pts.point(rng.uniform_index(pts.size())) + rng.complex_gaussian(s2);
            const SampleSet set(quadrature_split(y));
            const TheoreticalCdf cdf(m, std::sqrt(s2));
            const double d = ks_statistic(set, std::cref(cdf));
            c.detail << "    " << to_string(m) << " @ " << snr << " dB: sup distance " << fmt(d, 5)
                     << '\n';
            c.require(d < 0.002, std::string(to_string(m)) + " sup distance < 0.002");
        }
}

void criterion_c42(Check& c)
{
    const std::map<Modulation, std::pair<double, double>> ref = {
        {Modulation::Qam4, {-1.0, 1e-9}},
        {Modulation::Qam16, {-0.68, 1e-9}},
        {Modulation::Qam64, {-0.6190, 5e-5}},
    };
    for (Modulation m : kAll) {
        const auto pts = constellation_points(m).points();
        const double v = sample_c42(std::vector<Complex>(pts.begin(), pts.end()), 0.0);
        const auto [target, tol] = ref.at(m);
        c.detail << "    " << to_string(m) << ": " << fmt(v, 10) << " (enumeration oracle "
                 << fmt(oracle::c42_enumerated(static_cast<int>(order(m))), 10) << ")\n";
        c.require(std::abs(v - target) <= tol, std::string(to_string(m)) + " C42 within tolerance");
    }
}

void criterion_pcc_snr(Check& c)
{
    const auto cfg = config_for(ExperimentKind::PccVsSnr,
                                "seed = 2\ntrials = 2000\nn_samples = 100\nsnr_grid_db = -5:1:25\n"
                                "methods = ks,cumulant\n");
    const auto res = by_method(run_pcc_vs_snr(cfg));
    const auto& ks = res.at("ks");
    const auto& cum = res.at("cumulant");
    const std::size_t n = cfg.trials;

    for (const auto& [snr, p] : cum)
        if (snr >= 15.0)
            c.require(p >= 0.72 && p <= 0.88, "cumulant Pcc in [0.72, 0.88] at " + fmt(snr, 0) + " dB");
    for (auto it = ks.begin(); std::next(it) != ks.end(); ++it) {
        const auto nx = std::next(it);
        const double tol = 2.0 * std::hypot(se(it->second, n), se(nx->second, n));
        c.require(nx->second >= it->second - tol,
                  "K-S Pcc nondecreasing from " + fmt(it->first, 0) + " to " + fmt(nx->first, 0) + " dB");
    }
    c.require(ks.at(20.0) - cum.at(20.0) >= 0.05, "K-S exceeds cumulant by 0.05 at 20 dB");
    c.detail << "    SNR   ks      cumulant\n";
    for (double snr : {-5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0})
        c.detail << "    " << fmt(snr, 0) << "  " << fmt(ks.at(snr)) << "  " << fmt(cum.at(snr)) << '\n';
}

void criterion_pcc_offset(Check& c)
{
    const auto cfg = config_for(ExperimentKind::PccVsOffset,
                                "seed = 2\ntrials = 2000\nsnr_db = 15\noffset_grid_db = -6:1:6\n"
                                "methods = ks,cumulant\n");
    const auto res = by_method(run_pcc_vs_offset(cfg));
    const auto& ks = res.at("ks");
    const double cum0 = res.at("cumulant").at(0.0);
    for (double o = -3.0; o <= 3.0; o += 1.0)
        c.require(ks.at(o) > cum0, "K-S at offset " + fmt(o, 0) + " dB exceeds cumulant at 0 dB");
    for (double o : {-6.0, 6.0}) {
        const double drop = ks.at(0.0) - ks.at(o);
        const double tol = 2.0 * std::hypot(se(ks.at(0.0), cfg.trials), se(ks.at(o), cfg.trials));
        c.require(drop > tol, "K-S degrades significantly at offset " + fmt(o, 0) + " dB");
    }
    c.detail << "    offset  ks\n";
    for (const auto& [o, p] : ks)
        c.detail << "    " << fmt(o, 0) << "  " << fmt(p) << '\n';
    c.detail << "    cumulant at offset 0: " << fmt(cum0) << '\n';
}

void criterion_table(Check& c)
{
    const auto fine = build_cdf_table(kAll, anchored_snr_grid(-15.0, 40.0, 1.0), 1.0);
    const std::size_t trials = 2000;
    std::size_t agree = 0;
    const double sigma = std::sqrt(snr_db_to_sigma_sq(15.0));
    for (std::size_t t = 0; t < trials; ++t) {
        const auto trial = make_awgn_trial(3, kAll, 15.0, 100, t);
        agree += classify_ks_exact(trial.samples, sigma, kAll).decided ==
                 classify_ks_table(trial.samples, 15.0, fine, kAll).decided;
    }
    const double rate = static_cast<double>(agree) / static_cast<double>(trials);
    c.detail << "    1 dB table agreement with exact K-S: " << fmt(rate) << '\n';
    c.require(rate >= 0.98, "1 dB table agrees on at least 98% of paired trials");

    const auto cfg = config_for(ExperimentKind::PccVsOffset,
                                "seed = 2\ntrials = 2000\nsnr_db = 15\noffset_grid_db = -6:1:6\n"
                                "methods = ks-table,cumulant\ntable_granularities_db = 5\n");
    const auto res = by_method(run_pcc_vs_offset(cfg));
    const auto& tab = res.at("ks-table-5dB");
    const auto& cum = res.at("cumulant");
    c.detail << "    offset  ks-table-5dB  cumulant\n";
    for (const auto& [o, p] : tab) {
        c.detail << "    " << fmt(o, 0) << "  " << fmt(p) << "  " << fmt(cum.at(o)) << '\n';
        c.require(p > cum.at(o), "5 dB table beats cumulant at offset " + fmt(o, 0) + " dB");
    }
}

void criterion_ks_oracle(Check& c)
{
    Rng rng(606);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const auto m = 1 + rng.uniform_index(20);
        std::vector<double> v(m);
        for (auto& x : v) {
            // some exact ties
            x = rng.uniform_index(4) == 0 ? std::round(rng.gaussian()) : 1.5 * rng.gaussian();
        }
        const Modulation fmt_m = kAll[rng.uniform_index(3)];
        const double sigma = 0.05 + static_cast<double>(rng.uniform_index(1000)) / 1000.0;
        const TheoreticalCdf cdf(fmt_m, sigma);
        const double lib = ks_statistic(SampleSet(v), std::cref(cdf));
        const double ref = oracle::ks_brute_force(v, std::cref(cdf), -6.0, 6.0, 2000);
        worst = std::max(worst, std::abs(lib - ref));
    }
    c.detail << "    largest deviation from brute force: " << worst << '\n';
    c.require(worst <= 1e-12, "ks_statistic within 1e-12 of brute force");
}

void criterion_mmse(Check& c)
{
    Rng rng(707);
    const auto& qam = constellation_points(Modulation::Qam16);
    double worst_gain = 0.0, worst_var = 0.0;
    const int draws = 30000;
    for (int t = 0; t < 10000; ++t) {
        const Eigen::Vector2cd h(rng.complex_gaussian(1.0), rng.complex_gaussian(1.0));
        const Eigen::Vector2cd g(rng.complex_gaussian(1.0), rng.complex_gaussian(1.0));
        const double s2 = std::pow(10.0, -(static_cast<double>(rng.uniform_index(3001)) / 100.0) / 10.0);
        const auto f = mmse_design(h, g, s2);
        worst_gain = std::max(worst_gain, std::abs(f.m.dot(g) - Complex(1.0, 0.0)));

        double acc = 0.0;
        for (int k = 0; k < draws; ++k) {
            const Complex x = qam.point(rng.uniform_index(qam.size()));
            const Complex xp = qam.point(rng.uniform_index(qam.size()));
            const Eigen::Vector2cd w(rng.complex_gaussian(s2), rng.complex_gaussian(s2));
            acc += std::norm(mmse_output(f, h * x + g * xp + w) - xp);
        }
        worst_var = std::max(worst_var, std::abs(acc / draws / f.residual_var - 1.0));
    }
    c.detail << "    max |m^H g - 1| = " << worst_gain << ", max relative variance error = "
             << fmt(worst_var, 4) << '\n';
    c.require(worst_gain <= 1e-9, "m^H g = 1 within 1e-9");
    c.require(worst_var <= 0.03, "Monte Carlo residual variance within 3%");
}

/// SNR at which log10 BER crosses `target`, linearly interpolated; NaN if never.
double crossing(const std::map<double, double>& ber, double target)
{
    for (auto it = ber.begin(); std::next(it) != ber.end(); ++it) {
        const auto nx = std::next(it);
        if (it->second >= target && nx->second < target) {
            if (nx->second <= 0.0)
                return nx->first;
            const double a = std::log10(it->second), b = std::log10(nx->second);
            return it->first + (std::log10(target) - a) / (b - a) * (nx->first - it->first);
        }
    }
    return std::nan("");
}

void criterion_ber(Check& c)
{
    for (const auto& [desired, expected] :
         std::vector<std::pair<std::string, double>>{{"QAM16", 2.0}, {"QAM64", 3.0}}) {
        const auto cfg = config_for(ExperimentKind::BerSweep,
                                    "seed = 4\ntrials = 400\nsubcarriers = 512\nsnr_grid_db = 10:2:34\n"
                                    "desired = " + desired + "\n");
        const std::size_t bits = cfg.trials * cfg.subcarriers * bits_per_symbol(cfg.desired);
        const auto res = by_method(run_ber_sweep(cfg));
        const auto& ideal = res.at("ideal");
        const auto& ks = res.at("ic-ks");
        const auto& mmse = res.at("mmse-only");
        const auto& cum = res.at("ic-cumulant");

        c.detail << "    desired " << desired << ", " << bits << " bits per point\n"
                 << "    SNR  ideal      ic-ks      mmse-only  ic-cumulant\n";
        for (const auto& [snr, b] : mmse) {
            char line[160];
            std::snprintf(line, sizeof line, "    %-4g %-10.3e %-10.3e %-10.3e %-10.3e\n", snr,
                          ideal.at(snr), ks.at(snr), b, cum.at(snr));
            c.detail << line;
            if (b > 0.05)
                continue;
            const std::string at = desired + " @ " + fmt(snr, 0) + " dB: ";
            c.require(ideal.at(snr) <= ks.at(snr), at + "ideal <= ic-ks");
            c.require(ks.at(snr) <= b, at + "ic-ks <= mmse-only");
            c.require(b <= cum.at(snr), at + "mmse-only <= ic-cumulant");
        }
        const double s_ks = crossing(ks, 0.01), s_mmse = crossing(mmse, 0.01);
        const double gain = s_mmse - s_ks;
        c.detail << "    BER 0.01 at " << fmt(s_ks, 2) << " dB (ic-ks), " << fmt(s_mmse, 2)
                 << " dB (mmse-only): gain " << fmt(gain, 2) << " dB, target " << fmt(expected, 0)
                 << " +- 1.5\n";
        c.require(std::isfinite(gain) && std::abs(gain - expected) <= 1.5,
                  desired + " ic-ks gain at BER 0.01 within 1.5 dB of " + fmt(expected, 0));
    }

    // diagnostic only: how often the cumulant classifier misses the interferer
    SdmaFrameConfig fc;
    fc.desired = Modulation::Qam16;
    for (double snr : {16.0, 24.0, 32.0}) {
        fc.sigma_sq = snr_db_to_sigma_sq(snr);
        std::size_t miss_cum = 0, miss_ks = 0, frames = 0;
        for (Modulation intf : kAll) {
            fc.interferer = intf;
            for (std::uint64_t s = 0; s < 100; ++s, ++frames) {
                const auto frame = generate_sdma_frame(fc, derive_seed(44, Stream::Channels, {s}));
                miss_cum += receive_sdma_frame(frame, fc, ReceiverMode::IcCumulant).misclassified_groups;
                miss_ks += receive_sdma_frame(frame, fc, ReceiverMode::IcKs).misclassified_groups;
            }
        }
        c.detail << "    interferer misclassification @ " << snr << " dB: cumulant "
                 << fmt(static_cast<double>(miss_cum) / frames, 3) << ", K-S "
                 << fmt(static_cast<double>(miss_ks) / frames, 3) << '\n';
    }
}

void criterion_determinism(Check& c)
{
    const std::vector<std::pair<ExperimentKind, std::string>> runs = {
        {ExperimentKind::PccVsSnr, "trials = 300\nsnr_grid_db = 0:5:20\n"},
        {ExperimentKind::PccVsOffset, "trials = 300\noffset_grid_db = -6:3:6\n"},
        {ExperimentKind::PccVsSamples, "trials = 300\nsample_size_grid = 20,100,500\n"},
        {ExperimentKind::BerSweep, "trials = 20\nsnr_grid_db = 10:10:30\nsubcarriers = 128\n"},
    };
    for (const auto& [kind, text] : runs) {
        auto cfg = config_for(kind, "seed = 77\n" + text);
        const auto first = to_csv(run_experiment(cfg));
        const auto again = to_csv(run_experiment(cfg));
        cfg.workers = 4;
        const auto parallel = to_csv(run_experiment(cfg));
        c.require(first == again, std::string(to_string(kind)) + " re-run is byte identical");
        c.require(first == parallel, std::string(to_string(kind)) + " 1 vs 4 workers byte identical");
    }

    auto tcfg = ExperimentConfig::defaults(ExperimentKind::BuildTable);
    c.require(serialize_table(build_table(tcfg, 1.0)) == serialize_table(build_table(tcfg, 1.0)),
              "build-table output byte identical");

    const auto trial = make_awgn_trial(5, kAll, 12.0, 200, 0);
    auto ccfg = config_for(ExperimentKind::Classify, "input = x.csv\nsnr_db = 12\nmethod = ks\n");
    std::ostringstream a, b;
    classify_to_csv(ccfg, trial.samples, a);
    classify_to_csv(ccfg, trial.samples, b);
    c.require(a.str() == b.str(), "classify output byte identical");
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
        {"1 theoretical CDF matches simulated ECDF", criterion_cdf},
        {"2 cumulant of full constellations", criterion_c42},
        {"3 Pcc versus SNR", criterion_pcc_snr},
        {"4 Pcc versus assumed-SNR offset", criterion_pcc_offset},
        {"5 quantized CDF table fidelity", criterion_table},
        {"6 K-S statistic against brute force", criterion_ks_oracle},
        {"7 unbiased MMSE algebra", criterion_mmse},
        {"8 SDMA receiver BER", criterion_ber},
        {"9 deterministic CSV output", criterion_determinism},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Check c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            fn(c);
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail << "    exception: " << e.what() << '\n';
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %s (%.1f s)\n", c.ok ? "PASS" : "FAIL", name.c_str(), secs);
        std::fputs(c.detail.str().c_str(), stdout);
        std::fflush(stdout);
        failures += !c.ok;
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
