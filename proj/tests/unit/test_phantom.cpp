#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gmatch/phantom.hpp"

using namespace gmatch;

namespace {

double sample_std(const std::vector<double>& xs, double mean) {
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (xs.size() - 1));
}

}  // namespace

TEST_CASE("decide_truthful threshold rule") {
    PhantomEstimate est;
    est.q_hat = 0.2;
    const double eps = 0.03;

    REQUIRE(decide_truthful(est.q_hat + 2 * eps, est, eps).verdict == Verdict::CredibleTruth);
    REQUIRE(decide_truthful(est.q_hat, est, eps).verdict == Verdict::NoConfidence);
    // boundary is strict
    REQUIRE(decide_truthful(est.q_hat + eps, est, eps).verdict == Verdict::NoConfidence);

    REQUIRE_THROWS_AS(decide_truthful(0.5, est, 0.0), ContractError);
    REQUIRE_THROWS_AS(decide_truthful(0.5, est, -1.0), ContractError);
}

TEST_CASE("decide_truthful is shift invariant") {
    Rng rng = make_rng(64);
    for (int t = 0; t < 200; ++t) {
        const double q = uniform01(rng);
        const double obs = uniform01(rng);
        const double eps = 0.01 + 0.2 * uniform01(rng);
        const double shift = 4.0 * uniform01(rng) - 2.0;
        REQUIRE(decide_truthful(obs, q, eps).verdict == decide_truthful(obs + shift, q + shift, eps).verdict);
    }
}

TEST_CASE("calibrate_phantom basic output and determinism") {
    SgmConfig cfg;
    Rng rng1 = make_rng(101);
    PhantomEstimate a = calibrate_phantom(80, 5, 0.3, 4, cfg, rng1);
    REQUIRE(a.replicates == 4);
    REQUIRE(a.per_replicate_strengths.size() == 4);
    double total = 0.0;
    for (double v : a.per_replicate_strengths) {
        REQUIRE(std::isfinite(v));
        REQUIRE(v < 1.0);
        total += v;
    }
    REQUIRE(a.q_hat == Catch::Approx(total / 4).margin(1e-15));

    Rng rng2 = make_rng(101);
    PhantomEstimate b = calibrate_phantom(80, 5, 0.3, 4, cfg, rng2);
    REQUIRE(a.q_hat == b.q_hat);
    REQUIRE(a.per_replicate_strengths == b.per_replicate_strengths);

    // parallel execution gives the same numbers as serial
    Rng rng3 = make_rng(101);
    PhantomEstimate c = calibrate_phantom(80, 5, 0.3, 4, cfg, rng3, 4);
    REQUIRE(a.per_replicate_strengths == c.per_replicate_strengths);
}

TEST_CASE("calibrate_phantom input validation") {
    SgmConfig cfg;
    Rng rng = make_rng(5);
    REQUIRE_THROWS_AS(calibrate_phantom(80, 0, 0.0, 4, cfg, rng), ContractError);
    REQUIRE_THROWS_AS(calibrate_phantom(80, 0, 1.0, 4, cfg, rng), ContractError);
    REQUIRE_THROWS_AS(calibrate_phantom(1, 0, 0.5, 4, cfg, rng), ContractError);
    REQUIRE_THROWS_AS(calibrate_phantom(80, 0, 0.5, 0, cfg, rng), ContractError);
    REQUIRE_THROWS_AS(
        calibrate_phantom(80, 0, DensityMode::Combined, 0.4, 0.5, 4, cfg, rng), ContractError);
    REQUIRE_NOTHROW(calibrate_phantom(40, 0, DensityMode::PerGraph, 0.4, 0.5, 2, cfg, rng));
}

TEST_CASE("equal-mean point masses give matching phantom levels") {
    SgmConfig cfg;
    Rng rng1 = make_rng(900);
    Rng rng2 = make_rng(901);
    const int reps = 6;
    PhantomEstimate a = calibrate_phantom(150, 10, 0.4, reps, cfg, rng1);
    PhantomEstimate b = calibrate_phantom(150, 10, 0.4, reps, cfg, rng2);
    const double se_a = sample_std(a.per_replicate_strengths, a.q_hat) / std::sqrt(reps);
    const double se_b = sample_std(b.per_replicate_strengths, b.q_hat) / std::sqrt(reps);
    const double pooled = std::sqrt(se_a * se_a + se_b * se_b);
    REQUIRE(std::abs(a.q_hat - b.q_hat) <= 3.0 * std::max(pooled, 1e-3));
}

TEST_CASE("single-block calibration reduces to the Erdos-Renyi form") {
    SgmConfig cfg;
    const int reps = 6;
    Rng rng1 = make_rng(777);
    PhantomEstimate er = calibrate_phantom(120, 8, 0.35, reps, cfg, rng1);
    Rng rng2 = make_rng(778);
    PhantomEstimate block = calibrate_phantom_block(120, 8, {1.0}, {{0.35}}, reps, cfg, rng2);

    REQUIRE(block.density1 == Catch::Approx(0.35));
    const double se_a = sample_std(er.per_replicate_strengths, er.q_hat) / std::sqrt(reps);
    const double se_b = sample_std(block.per_replicate_strengths, block.q_hat) / std::sqrt(reps);
    const double pooled = std::sqrt(se_a * se_a + se_b * se_b);
    REQUIRE(std::abs(er.q_hat - block.q_hat) <= 3.0 * std::max(pooled, 1e-3));
}

TEST_CASE("block calibration validates pi") {
    SgmConfig cfg;
    Rng rng = make_rng(2);
    REQUIRE_THROWS_AS(calibrate_phantom_block(50, 0, {0.6, 0.6}, {{0.3, 0.4}, {0.4, 0.5}}, 2, cfg, rng),
                      SpecError);
}
