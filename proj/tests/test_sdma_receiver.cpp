#include <doctest.h>

#include <cmath>
#include <vector>

#include "ksamc/classifiers.hpp"
#include "ksamc/sdma_receiver.hpp"

using namespace ksamc;
using Eigen::Vector2cd;

namespace {

Vector2cd random_vector(Rng& rng)
{
    return {rng.complex_gaussian(1.0), rng.complex_gaussian(1.0)};
}

}  // namespace

TEST_CASE("mmse_design on orthogonal channels")
{
    const Vector2cd h(1.0, 0.0), g(0.0, 1.0);
    const auto f = mmse_design(h, g, 0.1);
    CHECK(std::abs(f.m(0)) < 1e-15);
    CHECK(std::abs(f.m(1) - Complex(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(f.alpha - Complex(0.1, 0.0)) < 1e-12);
    CHECK(f.residual_var == doctest::Approx(0.1));
}

TEST_CASE("mmse_design is unbiased for random channels")
{
    Rng rng(31);
    for (int t = 0; t < 2000; ++t) {
        const Vector2cd h = random_vector(rng), g = random_vector(rng);
        const double s2 = std::pow(10.0, -4.0 + 5.0 * static_cast<double>(rng.uniform_index(1000)) / 1000.0);
        const auto f = mmse_design(h, g, s2);
        CHECK(std::abs(f.m.dot(g) - Complex(1.0, 0.0)) < 1e-9);
        CHECK(f.residual_var >= 0.0);
        CHECK(std::abs(f.alpha.imag()) < 1e-9 * std::abs(f.alpha));
    }
}

TEST_CASE("mmse_design errors")
{
    const Vector2cd h(1.0, 0.5), g(0.3, -1.0);
    CHECK_THROWS_AS(mmse_design(h, g, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(mmse_design(h, g, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(mmse_design(h, Vector2cd::Zero(), 0.1), std::domain_error);
}

TEST_CASE("mmse_output passes the extracted user")
{
    Rng rng(32);
    const Vector2cd h = random_vector(rng), g = random_vector(rng);
    const auto f = mmse_design(h, g, 0.05);
    const Complex xp(0.3, -0.9);
    CHECK(std::abs(mmse_output(f, g * xp) - xp) < 1e-12);

    // residual variance matches a Monte Carlo estimate
    const auto& c = constellation_points(Modulation::Qam16);
    double acc = 0.0;
    const int trials = 200000;
    for (int t = 0; t < trials; ++t) {
        const Complex x = c.point(rng.uniform_index(c.size()));
        const Complex x2 = c.point(rng.uniform_index(c.size()));
        const Vector2cd w(rng.complex_gaussian(0.05), rng.complex_gaussian(0.05));
        acc += std::norm(mmse_output(f, h * x + g * x2 + w) - x2);
    }
    CHECK(std::abs(acc / trials / f.residual_var - 1.0) < 0.03);
}

TEST_CASE("classify_interferer")
{
    SdmaFrameConfig cfg;
    cfg.desired = Modulation::Qam16;
    cfg.interferer = Modulation::Qam16;
    cfg.sigma_sq = snr_db_to_sigma_sq(15.0);
    int correct = 0;
    for (std::uint64_t s = 0; s < 1000; ++s)
        correct += run_sdma_frame(cfg, ReceiverMode::IcKs, 4000 + s).misclassified_groups == 0;
    CHECK(correct >= 900);

    const std::vector<Complex> one = {{0.2, -0.1}};
    const std::vector<Modulation> all(std::begin(kAllModulations), std::end(kAllModulations));
    CHECK_NOTHROW(classify_interferer(one, 0.05, InterfererClassifier::KsExact, all));
    CHECK_THROWS_AS(classify_interferer(std::vector<Complex>{}, 0.05, InterfererClassifier::KsExact, all),
                    std::invalid_argument);
    CHECK_THROWS_AS(classify_interferer(one, 0.05, InterfererClassifier::KsTable, all, nullptr),
                    std::invalid_argument);
}

TEST_CASE("cancel_and_demod")
{
    Rng rng(33);
    const auto& c = constellation_points(Modulation::Qam64);
    for (int t = 0; t < 200; ++t) {
        const Vector2cd h = random_vector(rng), g = random_vector(rng);
        const auto i = rng.uniform_index(c.size());
        const Complex xp = rng.complex_gaussian(1.0);
        const Vector2cd y = h * c.point(i) + g * xp;
        const auto out = cancel_and_demod(y, h, g, xp, c);
        CHECK(out.decided == i);
        CHECK(std::abs(out.beta - h.squaredNorm() * c.point(i)) < 1e-9);
    }
    CHECK_THROWS_AS(cancel_and_demod(Vector2cd(1, 1), Vector2cd::Zero(), Vector2cd(1, 0), 0.0, c),
                    std::domain_error);
}

TEST_CASE("receiver modes on a clean frame")
{
    SdmaFrameConfig cfg;
    cfg.subcarriers = 128;
    cfg.desired = Modulation::Qam64;
    cfg.interferer = Modulation::Qam4;
    cfg.sigma_sq = 1e-8;
    for (auto mode : {ReceiverMode::Ideal, ReceiverMode::IcKs, ReceiverMode::MmseOnly}) {
        const auto r = run_sdma_frame(cfg, mode, 17);
        CHECK(r.desired_bits_total == 128 * 6);
        CHECK(r.desired_bit_errors == 0);
    }
}

TEST_CASE("ic-ks equals ideal when the interferer decisions are right")
{
    SdmaFrameConfig cfg;
    cfg.desired = Modulation::Qam16;
    cfg.interferer = Modulation::Qam4;
    cfg.group_size = 64;
    cfg.sigma_sq = snr_db_to_sigma_sq(30.0);
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto frame = generate_sdma_frame(cfg, 900 + s);
        const auto ks = receive_sdma_frame(frame, cfg, ReceiverMode::IcKs);
        const auto ideal = receive_sdma_frame(frame, cfg, ReceiverMode::Ideal);
        CHECK(ks.classified.size() == 8);
        if (ks.misclassified_groups == 0 && ks.interferer_symbol_errors == 0)
            CHECK(ks.desired_bit_errors == ideal.desired_bit_errors);
        CHECK(ideal.classified.empty());
    }
}

TEST_CASE("frame generation is deterministic and validated")
{
    SdmaFrameConfig cfg;
    cfg.subcarriers = 16;
    cfg.words = 3;
    const auto a = generate_sdma_frame(cfg, 5), b = generate_sdma_frame(cfg, 5);
    CHECK(a.desired_indices == b.desired_indices);
    CHECK(a.x_prime == b.x_prime);
    for (std::size_t l = 0; l < 16; ++l)
        for (std::size_t n = 0; n < 3; ++n)
            CHECK(a.y.at(l, n) == b.y.at(l, n));

    auto bad = cfg;
    bad.subcarriers = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.group_size = 17;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.candidates.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.use_table = true;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.sigma_sq = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    CHECK(parse_receiver_mode("ic-cumulant") == ReceiverMode::IcCumulant);
    CHECK_THROWS_AS(parse_receiver_mode("zf"), std::invalid_argument);
}
