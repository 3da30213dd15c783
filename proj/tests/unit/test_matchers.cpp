#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <vector>

#include "gmatch/matchers.hpp"
#include "gmatch/random_models.hpp"

using namespace gmatch;

namespace {

// Exhaustive minimum of the full disagreement count over seed-respecting
// bijections.
long long brute_force_min_disagreements(const Graph& g1, const Graph& g2, const SeedPartition& p) {
    std::vector<int> assign(p.nonseed_count());
    std::iota(assign.begin(), assign.end(), 0);
    long long best = -1;
    do {
        const long long d = full_disagreements(g1, g2, Matching(p, assign));
        if (best < 0 || d < best) best = d;
    } while (std::next_permutation(assign.begin(), assign.end()));
    return best;
}

// Random isomorphic pair with known truth: g2 is g1 relabeled by a random
// permutation; the partition's seed pairs and the returned truth follow it.
struct IsoInstance {
    Graph g1, g2;
    SeedPartition partition;
    Matching truth;
};

IsoInstance random_isomorphic_instance(int nt, int s, double p, Rng& rng) {
    Graph g1 = erdos_renyi(nt, p, rng);
    std::vector<int> tau(nt);
    std::iota(tau.begin(), tau.end(), 0);
    for (int i = nt - 1; i > 0; --i)
        std::swap(tau[i], tau[uniform_below(rng, static_cast<std::uint64_t>(i + 1))]);
    Graph g2(nt);
    for (int u = 0; u < nt; ++u)
        for (int v = u + 1; v < nt; ++v)
            if (g1.has_edge(u, v)) g2.add_edge(tau[u], tau[v]);

    auto seed_vertices = sample_without_replacement(nt, s, rng);
    std::vector<std::pair<int, int>> pairs;
    for (int v : seed_vertices) pairs.emplace_back(v, tau[v]);
    SeedPartition partition(nt, pairs);

    const auto& ns1 = partition.nonseeds1();
    const auto& ns2 = partition.nonseeds2();
    std::vector<int> pos(nt, -1);
    for (std::size_t j = 0; j < ns2.size(); ++j) pos[ns2[j]] = static_cast<int>(j);
    std::vector<int> assign(ns1.size());
    for (std::size_t i = 0; i < ns1.size(); ++i) assign[i] = pos[tau[ns1[i]]];
    Matching truth(partition, assign);
    return IsoInstance{std::move(g1), std::move(g2), std::move(partition), std::move(truth)};
}

}  // namespace

TEST_CASE("exact matcher finds zero on isomorphic pairs") {
    Rng rng = make_rng(90);
    for (int t = 0; t < 10; ++t) {
        IsoInstance inst = random_isomorphic_instance(12, 4, 0.4, rng);
        MatchResult res = exact_match(inst.g1, inst.g2, inst.partition);
        REQUIRE(res.full_disagreements == 0);
        REQUIRE(res.proven_optimal);
        REQUIRE(res.solver == SolverKind::Exact);
        REQUIRE(res.full_strength == 1.0);
    }
}

TEST_CASE("exact matcher equals exhaustive enumeration") {
    Rng rng = make_rng(1812);
    for (int t = 0; t < 15; ++t) {
        const int nt = 5 + static_cast<int>(uniform_below(rng, 3));  // 5..7
        const int s = static_cast<int>(uniform_below(rng, 3));
        if (nt - s < 2) continue;
        CorrelatedPairSpec spec;
        spec.n = nt - s;
        spec.s = s;
        spec.edge_corr = 0.3;
        spec.source = ParamDistribution{PointMass{0.5}};
        CorrelatedPair pair = sample_correlated_pair(spec, rng);

        MatchResult res = exact_match(pair.g1, pair.g2, pair.partition);
        REQUIRE(res.full_disagreements ==
                brute_force_min_disagreements(pair.g1, pair.g2, pair.partition));
        REQUIRE(objective_from_disagreements(pair.g1, pair.g2, res.matching) ==
                res.full_disagreements);
    }
}

TEST_CASE("exact matcher beats random bijections") {
    Rng rng = make_rng(17);
    CorrelatedPairSpec spec;
    spec.n = 10;
    spec.s = 3;
    spec.edge_corr = 0.2;
    spec.source = ParamDistribution{PointMass{0.4}};
    CorrelatedPair pair = sample_correlated_pair(spec, rng);
    MatchResult res = exact_match(pair.g1, pair.g2, pair.partition);

    std::vector<int> assign(10);
    std::iota(assign.begin(), assign.end(), 0);
    for (int t = 0; t < 1000; ++t) {
        for (int i = 9; i > 0; --i)
            std::swap(assign[i], assign[uniform_below(rng, static_cast<std::uint64_t>(i + 1))]);
        REQUIRE(res.full_disagreements <=
                full_disagreements(pair.g1, pair.g2, Matching(pair.partition, assign)));
    }
}

TEST_CASE("exact matcher size limit") {
    Graph g(20);
    SeedPartition p = SeedPartition::no_seeds(20);
    REQUIRE_THROWS_AS(exact_match(g, g, p), SizeLimitError);
    ExactConfig wide;
    wide.max_nonseeds = 20;
    Rng rng = make_rng(808);
    Graph a = erdos_renyi(20, 0.2, rng);
    REQUIRE_NOTHROW(exact_match(a, a, p, wide));
}

TEST_CASE("objective shim named values") {
    Graph complete = Graph::complete(6);
    Graph empty(6);
    Matching id = Matching::identity(SeedPartition::no_seeds(6));
    REQUIRE(objective_from_disagreements(complete, complete, id) == 0);
    REQUIRE(objective_from_disagreements(complete, empty, id) == choose2(6));

    Rng rng = make_rng(23);
    Graph g1 = erdos_renyi(8, 0.5, rng);
    Graph g2 = erdos_renyi(8, 0.5, rng);
    long long direct = 0;
    for (int u = 0; u < 8; ++u)
        for (int v = u + 1; v < 8; ++v) direct += g1.has_edge(u, v) != g2.has_edge(u, v);
    REQUIRE(objective_from_disagreements(g1, g2, Matching::identity(SeedPartition::no_seeds(8))) ==
            direct);
}

TEST_CASE("sgm on identical graphs with identity start") {
    Rng rng = make_rng(6021);
    Graph g = erdos_renyi(40, 0.3, rng);
    SeedPartition p = SeedPartition::no_seeds(40);
    SgmConfig cfg;
    cfg.initialization = SgmInit::Identity;
    MatchResult res = sgm_match(g, g, p, cfg);
    REQUIRE(res.full_disagreements == 0);
    REQUIRE(res.matching == Matching::identity(p));
    REQUIRE_FALSE(res.proven_optimal);
}

TEST_CASE("sgm iterates stay doubly stochastic and the objective ascends") {
    Rng rng = make_rng(40);
    CorrelatedPairSpec spec;
    spec.n = 60;
    spec.s = 6;
    spec.edge_corr = 0.4;
    spec.source = ParamDistribution{PointMass{0.5}};
    CorrelatedPair pair = sample_correlated_pair(spec, rng);

    double last_objective = -1e300;
    int steps = 0;
    SgmConfig cfg;
    cfg.convergence_tol = 1e-9;  // force many iterations
    cfg.on_iterate = [&](const SgmIterate& it) {
        ++steps;
        const auto& m = it.iterate;
        for (int i = 0; i < m.rows(); ++i) {
            REQUIRE(m.row(i).sum() == Catch::Approx(1.0).margin(1e-9));
            REQUIRE(m.col(i).sum() == Catch::Approx(1.0).margin(1e-9));
        }
        REQUIRE(m.minCoeff() >= -1e-12);
        REQUIRE(it.objective >= last_objective - 1e-9);
        last_objective = it.objective;
    };
    sgm_match(pair.g1, pair.g2, pair.partition, cfg);
    REQUIRE(steps >= 2);
}

TEST_CASE("sgm recovers isomorphic instances with seeds") {
    Rng rng = make_rng(2718);
    int exact_hits = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        IsoInstance inst = random_isomorphic_instance(100, 5, 0.4, rng);
        MatchResult res = sgm_match(inst.g1, inst.g2, inst.partition);
        if (res.full_disagreements == 0) ++exact_hits;
        // always a valid bijection
        std::vector<char> hit(res.matching.assignment().size(), 0);
        for (int j : res.matching.assignment()) {
            REQUIRE_FALSE(hit[j]);
            hit[j] = 1;
        }
    }
    REQUIRE(exact_hits >= 95);
}

TEST_CASE("sgm recovers a strongly correlated pair") {
    Rng rng = make_rng(11883);
    CorrelatedPairSpec spec;
    spec.n = 300;
    spec.s = 30;
    spec.edge_corr = 0.9;
    spec.source = ParamDistribution{PointMass{0.5}};
    CorrelatedPair pair = sample_correlated_pair(spec, rng);
    MatchResult res = sgm_match(pair.g1, pair.g2, pair.partition);
    REQUIRE(match_ratio(res.matching, pair.truth) == 1.0);
    REQUIRE(res.restricted_strength == Catch::Approx(0.9).margin(0.05));
}

TEST_CASE("sgm restarts are deterministic") {
    Rng rng = make_rng(3333);
    CorrelatedPairSpec spec;
    spec.n = 30;
    spec.s = 2;
    spec.edge_corr = 0.5;
    spec.source = ParamDistribution{PointMass{0.5}};
    CorrelatedPair pair = sample_correlated_pair(spec, rng);

    SgmConfig cfg;
    cfg.restarts = 3;
    MatchResult a = sgm_match(pair.g1, pair.g2, pair.partition, cfg);
    MatchResult b = sgm_match(pair.g1, pair.g2, pair.partition, cfg);
    REQUIRE(a.matching == b.matching);
    REQUIRE(a.full_disagreements == b.full_disagreements);

    SgmConfig plain;
    MatchResult c = sgm_match(pair.g1, pair.g2, pair.partition, plain);
    REQUIRE(a.full_disagreements <= c.full_disagreements);  // restarts can only help
}

TEST_CASE("match result fields are consistent with graph-core") {
    Rng rng = make_rng(515);
    CorrelatedPairSpec spec;
    spec.n = 25;
    spec.s = 5;
    spec.edge_corr = 0.6;
    spec.source = ParamDistribution{UniformInterval{0.3, 0.7}};
    CorrelatedPair pair = sample_correlated_pair(spec, rng);
    MatchResult res = sgm_match(pair.g1, pair.g2, pair.partition);
    REQUIRE(res.full_disagreements == full_disagreements(pair.g1, pair.g2, res.matching));
    REQUIRE(res.restricted_disagreements == restricted_disagreements(pair.g1, pair.g2, res.matching));
    REQUIRE(res.full_strength ==
            Catch::Approx(full_alignment_strength(pair.g1, pair.g2, res.matching)).margin(1e-15));
    REQUIRE(res.restricted_strength ==
            Catch::Approx(restricted_alignment_strength(pair.g1, pair.g2, res.matching)).margin(1e-15));
}

TEST_CASE("sgm config validation") {
    Graph g(4);
    SeedPartition p = SeedPartition::no_seeds(4);
    SgmConfig bad;
    bad.max_iterations = 0;
    REQUIRE_THROWS_AS(sgm_match(g, g, p, bad), ContractError);
    bad = SgmConfig{};
    bad.convergence_tol = 0.0;
    REQUIRE_THROWS_AS(sgm_match(g, g, p, bad), ContractError);
}
