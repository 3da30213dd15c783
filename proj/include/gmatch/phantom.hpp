#pragma once

#include <string>
#include <vector>

#include "gmatch/matchers.hpp"
#include "gmatch/parallel.hpp"
#include "gmatch/random_models.hpp"

namespace gmatch {

enum class DensityMode { Combined, PerGraph };

// Calibration result: the alignment strength the SGM matcher attains on
// completely uncorrelated graphs of matched density, i.e. the level below
// which observed alignment strength carries no evidence of a true matching.
struct PhantomEstimate {
    double q_hat = 0.0;  // mean of the replicate strengths
    int replicates = 0;
    std::vector<double> per_replicate_strengths;
    DensityMode density_mode = DensityMode::Combined;
    int n = 0, s = 0;
    double density1 = 0.0, density2 = 0.0;  // equal in Combined mode
};

enum class Verdict { CredibleTruth, NoConfidence };

struct TruthDecision {
    double observed_strength = 0.0;
    double q_hat = 0.0;
    double epsilon = 0.0;
    Verdict verdict = Verdict::NoConfidence;
};

// For each replicate: realize two independent Erdos-Renyi graphs (total
// correlation exactly 0), pick s seeds uniformly, match with SGM, and record
// the restricted alignment strength. q_hat is the replicate mean.
inline PhantomEstimate calibrate_phantom(int n, int s, DensityMode mode, double density1,
                                         double density2, int replicates, const SgmConfig& cfg,
                                         Rng& rng, int jobs = 1) {
    if (n < 2) throw ContractError("calibrate_phantom: need at least 2 nonseeds");
    if (s < 0) throw ContractError("calibrate_phantom: negative seed count");
    if (replicates < 1) throw ContractError("calibrate_phantom: need at least one replicate");
    if (!(density1 > 0.0 && density1 < 1.0) || !(density2 > 0.0 && density2 < 1.0))
        throw ContractError("calibrate_phantom: densities must lie strictly inside (0,1)");
    if (mode == DensityMode::Combined && density1 != density2)
        throw ContractError("calibrate_phantom: combined mode requires equal densities");

    const int nt = n + s;
    const std::uint64_t root = rng();
    std::vector<double> strengths(replicates);
    parallel_for(replicates, jobs, [&](long long r) {
        Rng local = make_rng(derive_seed(root, static_cast<std::uint64_t>(r)));
        Graph h1 = erdos_renyi(nt, density1, local);
        Graph h2 = erdos_renyi(nt, density2, local);
        std::vector<int> seeds = sample_without_replacement(nt, s, local);
        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(seeds.size());
        for (int v : seeds) pairs.emplace_back(v, v);
        SeedPartition partition(nt, std::move(pairs));
        MatchResult res = sgm_match(h1, h2, partition, cfg);
        strengths[r] = res.restricted_strength;
    });

    PhantomEstimate est;
    est.replicates = replicates;
    est.per_replicate_strengths = std::move(strengths);
    double total = 0.0;
    for (double v : est.per_replicate_strengths) total += v;
    est.q_hat = total / replicates;
    est.density_mode = mode;
    est.n = n;
    est.s = s;
    est.density1 = density1;
    est.density2 = density2;
    return est;
}

// Combined-density convenience form.
inline PhantomEstimate calibrate_phantom(int n, int s, double density, int replicates,
                                         const SgmConfig& cfg, Rng& rng, int jobs = 1) {
    return calibrate_phantom(n, s, DensityMode::Combined, density, density, replicates, cfg, rng, jobs);
}

// Block-model calibration: H1, H2 are independent Bernoulli graphs whose
// parameter for each pair is the entry of M for the blocks of its endpoints,
// blocks apportioned i.i.d. from pi.
inline PhantomEstimate calibrate_phantom_block(int n, int s, const std::vector<double>& pi,
                                               const std::vector<std::vector<double>>& m,
                                               int replicates, const SgmConfig& cfg, Rng& rng,
                                               int jobs = 1) {
    if (n < 2) throw ContractError("calibrate_phantom_block: need at least 2 nonseeds");
    if (replicates < 1) throw ContractError("calibrate_phantom_block: need at least one replicate");
    BlockModelSpec block = BlockModelSpec::point_masses(pi, m);

    const std::uint64_t root = rng();
    std::vector<double> strengths(replicates);
    parallel_for(replicates, jobs, [&](long long r) {
        Rng local = make_rng(derive_seed(root, static_cast<std::uint64_t>(r)));
        CorrelatedPairSpec spec;
        spec.n = n;
        spec.s = s;
        spec.edge_corr = 0.0;
        spec.source = block;
        CorrelatedPair pair = sample_correlated_pair(spec, local);
        MatchResult res = sgm_match(pair.g1, pair.g2, pair.partition, cfg);
        strengths[r] = res.restricted_strength;
    });

    PhantomEstimate est;
    est.replicates = replicates;
    est.per_replicate_strengths = std::move(strengths);
    double total = 0.0;
    for (double v : est.per_replicate_strengths) total += v;
    est.q_hat = total / replicates;
    est.density_mode = DensityMode::Combined;
    est.n = n;
    est.s = s;
    est.density1 = est.density2 = block.expected_mean();
    return est;
}

// Threshold rule: credible truth iff the observed strength is strictly more
// than epsilon above the phantom level.
inline TruthDecision decide_truthful(double observed_strength, double q_hat, double epsilon = 0.03) {
    if (!(epsilon > 0.0)) throw ContractError("decide_truthful: epsilon must be positive");
    TruthDecision d;
    d.observed_strength = observed_strength;
    d.q_hat = q_hat;
    d.epsilon = epsilon;
    d.verdict = observed_strength > q_hat + epsilon ? Verdict::CredibleTruth : Verdict::NoConfidence;
    return d;
}

inline TruthDecision decide_truthful(double observed_strength, const PhantomEstimate& estimate,
                                     double epsilon = 0.03) {
    return decide_truthful(observed_strength, estimate.q_hat, epsilon);
}

inline std::string to_string(Verdict v) {
    return v == Verdict::CredibleTruth ? "credible-truth" : "no-confidence";
}

}  // namespace gmatch
