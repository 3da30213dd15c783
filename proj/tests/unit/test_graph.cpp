#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <vector>

#include "gmatch/graph.hpp"
#include "gmatch/rng.hpp"

using namespace gmatch;

namespace {

Graph make_graph(int n, std::vector<std::pair<int, int>> edges) {
    return Graph(n, std::span<const std::pair<int, int>>(edges));
}

// Independent disagreement oracle: direct pair scan, no bit tricks.
long long oracle_disagreements(const Graph& g1, const Graph& g2, const std::vector<int>& phi,
                               const std::vector<int>& side1_vertices) {
    long long count = 0;
    for (std::size_t a = 0; a < side1_vertices.size(); ++a)
        for (std::size_t b = a + 1; b < side1_vertices.size(); ++b) {
            const int u = side1_vertices[a], v = side1_vertices[b];
            if (g1.has_edge(u, v) != g2.has_edge(phi[u], phi[v])) ++count;
        }
    return count;
}

std::vector<int> all_vertices(int n) {
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

// Definitional full strength: 1 - D'(phi) / mean over all n! bijections.
double oracle_full_strength(const Graph& g1, const Graph& g2, const Matching& m) {
    const int n = g1.n_vertices();
    const auto verts = all_vertices(n);
    std::vector<int> phi = all_vertices(n);
    double total = 0.0;
    long long count = 0;
    std::sort(phi.begin(), phi.end());
    do {
        total += static_cast<double>(oracle_disagreements(g1, g2, phi, verts));
        ++count;
    } while (std::next_permutation(phi.begin(), phi.end()));
    const double mean = total / static_cast<double>(count);
    const auto own = oracle_disagreements(g1, g2, m.vertex_map(), verts);
    return 1.0 - static_cast<double>(own) / mean;
}

// Definitional restricted strength: mean over seed-respecting bijections,
// disagreements restricted to nonseed pairs of side 1.
double oracle_restricted_strength(const Graph& g1, const Graph& g2, const Matching& m) {
    const auto& p = m.partition();
    const auto& ns1 = p.nonseeds1();
    const auto& ns2 = p.nonseeds2();
    const int n = p.nonseed_count();
    std::vector<int> base(p.n_total(), -1);
    for (auto [a, b] : p.seed_pairs()) base[a] = b;

    std::vector<int> assign(n);
    std::iota(assign.begin(), assign.end(), 0);
    double total = 0.0;
    long long count = 0;
    do {
        std::vector<int> phi = base;
        for (int i = 0; i < n; ++i) phi[ns1[i]] = ns2[assign[i]];
        total += static_cast<double>(oracle_disagreements(g1, g2, phi, ns1));
        ++count;
    } while (std::next_permutation(assign.begin(), assign.end()));
    const double mean = total / static_cast<double>(count);
    const auto own = oracle_disagreements(g1, g2, m.vertex_map(), ns1);
    return 1.0 - static_cast<double>(own) / mean;
}

Graph random_graph(int n, double p, Rng& rng) {
    Graph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (bernoulli(rng, p)) g.add_edge(u, v);
    return g;
}

SeedPartition random_partition(int n_total, int s, Rng& rng) {
    auto firsts = sample_without_replacement(n_total, s, rng);
    auto seconds = sample_without_replacement(n_total, s, rng);
    std::vector<std::pair<int, int>> pairs;
    for (int k = 0; k < s; ++k) pairs.emplace_back(firsts[k], seconds[k]);
    return SeedPartition(n_total, pairs);
}

Matching random_matching(const SeedPartition& p, Rng& rng) {
    const int n = p.nonseed_count();
    std::vector<int> assign(n);
    std::iota(assign.begin(), assign.end(), 0);
    for (int i = n - 1; i > 0; --i)
        std::swap(assign[i], assign[uniform_below(rng, static_cast<std::uint64_t>(i + 1))]);
    return Matching(p, assign);
}

}  // namespace

TEST_CASE("graph basics") {
    Graph g = make_graph(4, {{0, 1}, {1, 2}});
    REQUIRE(g.n_vertices() == 4);
    REQUIRE(g.edge_count() == 2);
    REQUIRE(g.has_edge(0, 1));
    REQUIRE(g.has_edge(2, 1));
    REQUIRE_FALSE(g.has_edge(0, 2));
    REQUIRE_FALSE(g.has_edge(3, 3));
    REQUIRE_THROWS_AS(g.add_edge(2, 2), ContractError);
    REQUIRE_THROWS_AS(g.has_edge(0, 4), ContractError);

    Graph dup = make_graph(3, {{0, 1}, {1, 0}});
    REQUIRE(dup.edge_count() == 1);
}

TEST_CASE("seed partition invariants") {
    SeedPartition p(5, {{4, 0}, {1, 3}});
    REQUIRE(p.seed_count() == 2);
    REQUIRE(p.nonseed_count() == 3);
    REQUIRE(p.nonseeds1() == std::vector<int>{0, 2, 3});
    REQUIRE(p.nonseeds2() == std::vector<int>{1, 2, 4});
    REQUIRE(p.seed_count() + p.nonseed_count() == p.n_total());

    REQUIRE_THROWS_AS(SeedPartition(4, {{0, 1}, {0, 2}}), ContractError);
    REQUIRE_THROWS_AS(SeedPartition(4, {{0, 1}, {2, 1}}), ContractError);
    REQUIRE_THROWS_AS(SeedPartition(4, {{0, 4}}), ContractError);
}

TEST_CASE("matching validation") {
    SeedPartition p(4, {{3, 3}});
    REQUIRE_THROWS_AS(Matching(p, {0, 0, 1}), ContractError);
    REQUIRE_THROWS_AS(Matching(p, {0, 1}), ContractError);
    Matching id = Matching::identity(p);
    REQUIRE(id.vertex_map() == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("full disagreements") {
    Graph g = make_graph(5, {{0, 1}, {2, 3}, {1, 4}});
    Matching id = Matching::identity(SeedPartition::no_seeds(5));
    REQUIRE(full_disagreements(g, g, id) == 0);

    Graph complete = Graph::complete(4);
    Graph empty(4);
    Matching id4 = Matching::identity(SeedPartition::no_seeds(4));
    REQUIRE(full_disagreements(complete, empty, id4) == 6);

    Graph path = make_graph(3, {{0, 1}, {1, 2}});
    Graph cherry = make_graph(3, {{0, 1}, {0, 2}});
    Matching id3 = Matching::identity(SeedPartition::no_seeds(3));
    REQUIRE(full_disagreements(path, cherry, id3) == 2);

    Graph small(3);
    REQUIRE_THROWS_AS(full_disagreements(small, empty, id4), ContractError);
}

TEST_CASE("restricted disagreements") {
    Rng rng = make_rng(11);
    // with no seeds, restricted equals full
    for (int trial = 0; trial < 20; ++trial) {
        Graph g1 = random_graph(6, 0.5, rng);
        Graph g2 = random_graph(6, 0.5, rng);
        Matching m = random_matching(SeedPartition::no_seeds(6), rng);
        REQUIRE(restricted_disagreements(g1, g2, m) == full_disagreements(g1, g2, m));
    }

    // all vertices seeded: the sum is empty
    SeedPartition all_seeds(3, {{0, 0}, {1, 1}, {2, 2}});
    Matching m0(all_seeds, {});
    Graph a = make_graph(3, {{0, 1}});
    Graph b = make_graph(3, {{1, 2}});
    REQUIRE(restricted_disagreements(a, b, m0) == 0);

    // the only disagreeing pair involves the seed
    Graph g1 = make_graph(4, {{0, 1}, {2, 3}});
    Graph g2 = make_graph(4, {{0, 1}});
    SeedPartition p(4, {{3, 3}});
    Matching id = Matching::identity(p);
    REQUIRE(restricted_disagreements(g1, g2, id) == 0);
    REQUIRE(full_disagreements(g1, g2, id) == 1);
}

TEST_CASE("densities") {
    REQUIRE(full_density(Graph(4)) == 0.0);
    REQUIRE(full_density(Graph::complete(5)) == 1.0);
    REQUIRE(full_density(make_graph(4, {{0, 1}, {1, 2}, {2, 3}})) == 0.5);
    REQUIRE_THROWS_AS(full_density(Graph(1)), UndefinedDensityError);

    // restricted density with no seeds equals full density
    Graph g = make_graph(5, {{0, 1}, {3, 4}, {1, 2}});
    SeedPartition none = SeedPartition::no_seeds(5);
    REQUIRE(restricted_density(g, none, 1) == full_density(g));
    REQUIRE(restricted_density(g, none, 2) == full_density(g));

    // induced subgraph on {0,1,2} of side 1 has 2 edges out of 3 pairs
    SeedPartition p(5, {{3, 3}, {4, 4}});
    REQUIRE(restricted_density(g, p, 1) == Catch::Approx(2.0 / 3.0));

    // induced subgraph empty
    Graph h = make_graph(5, {{3, 4}});
    REQUIRE(restricted_density(h, p, 1) == 0.0);

    SeedPartition too_many(4, {{0, 0}, {1, 1}, {2, 2}});
    REQUIRE_THROWS_AS(restricted_density(make_graph(4, {}), too_many, 1), UndefinedDensityError);
    REQUIRE_THROWS_AS(restricted_density(g, p, 3), ContractError);
}

TEST_CASE("alignment strength closed form values") {
    // D = 0 gives strength 1
    Graph g = make_graph(4, {{0, 1}, {2, 3}});
    Matching id = Matching::identity(SeedPartition::no_seeds(4));
    REQUIRE(restricted_alignment_strength(g, g, id) == 1.0);
    REQUIRE(full_alignment_strength(g, g, id) == 1.0);

    // d1 = d2 = 0.5 on 4 vertices with D = 2: 1 - (2/6)/0.5 = 1/3
    Graph g1 = make_graph(4, {{0, 1}, {0, 2}, {0, 3}});
    Graph g2 = make_graph(4, {{0, 1}, {0, 2}, {1, 3}});
    REQUIRE(full_disagreements(g1, g2, id) == 2);
    REQUIRE(full_alignment_strength(g1, g2, id) == Catch::Approx(1.0 / 3.0).margin(1e-15));

    // count-level form: D = 3 over 6 pairs at matched density 0.5 sits at 0
    REQUIRE(alignment_strength_from_counts(3, 6, 0.5, 0.5) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(alignment_strength_from_counts(2, 6, 0.5, 0.5) == Catch::Approx(1.0 / 3.0).margin(1e-15));

    // degenerate denominator: both graphs empty
    Graph e1(4), e2(4);
    REQUIRE_THROWS_AS(full_alignment_strength(e1, e2, id), DegenerateStrengthError);
    try {
        full_alignment_strength(e1, e2, id);
    } catch (const DegenerateStrengthError& err) {
        REQUIRE(err.density1 == 0.0);
        REQUIRE(err.density2 == 0.0);
    }
    REQUIRE_THROWS_AS(full_alignment_strength(Graph::complete(4), Graph::complete(4), id),
                      DegenerateStrengthError);
}

TEST_CASE("closed form equals definitional form by enumeration") {
    Rng rng = make_rng(2024);
    int done = 0;
    while (done < 40) {
        const int nt = 4 + static_cast<int>(uniform_below(rng, 3));  // 4..6
        const int s = static_cast<int>(uniform_below(rng, 3));       // 0..2
        if (nt - s < 2) continue;
        const double p = 0.3 + 0.2 * static_cast<double>(uniform_below(rng, 3));
        Graph g1 = random_graph(nt, p, rng);
        Graph g2 = random_graph(nt, p, rng);
        SeedPartition part = random_partition(nt, s, rng);
        Matching m = random_matching(part, rng);

        const double fd1 = full_density(g1), fd2 = full_density(g2);
        if (fd1 * (1 - fd2) + (1 - fd1) * fd2 == 0.0) continue;
        const double rd1 = restricted_density(g1, part, 1), rd2 = restricted_density(g2, part, 2);
        if (rd1 * (1 - rd2) + (1 - rd1) * rd2 == 0.0) continue;

        REQUIRE(full_alignment_strength(g1, g2, m) ==
                Catch::Approx(oracle_full_strength(g1, g2, m)).margin(1e-12));
        REQUIRE(restricted_alignment_strength(g1, g2, m) ==
                Catch::Approx(oracle_restricted_strength(g1, g2, m)).margin(1e-12));
        ++done;
    }
}

TEST_CASE("disagreement ordering and symmetry invariants") {
    Rng rng = make_rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const int nt = 5 + static_cast<int>(uniform_below(rng, 4));
        const int s = static_cast<int>(uniform_below(rng, 3));
        if (nt - s < 2) continue;
        Graph g1 = random_graph(nt, 0.4, rng);
        Graph g2 = random_graph(nt, 0.6, rng);
        SeedPartition part = random_partition(nt, s, rng);
        Matching m = random_matching(part, rng);

        const auto d = restricted_disagreements(g1, g2, m);
        const auto dp = full_disagreements(g1, g2, m);
        REQUIRE(d >= 0);
        REQUIRE(d <= dp);
        REQUIRE(dp <= choose2(nt));

        // swapping the graphs and inverting the matching changes nothing
        Matching inv = m.inverse();
        REQUIRE(full_disagreements(g2, g1, inv) == dp);
        REQUIRE(restricted_disagreements(g2, g1, inv) == d);

        const double fd1 = full_density(g1), fd2 = full_density(g2);
        if (fd1 * (1 - fd2) + (1 - fd1) * fd2 != 0.0)
            REQUIRE(full_alignment_strength(g2, g1, inv) ==
                    Catch::Approx(full_alignment_strength(g1, g2, m)).margin(1e-12));
    }
}

TEST_CASE("alignment strength can be negative but never exceeds 1") {
    // star matched to itself through a rotation: worse than an average
    // bijection, so the strength goes negative
    Graph star = make_graph(4, {{0, 1}, {0, 2}, {0, 3}});
    Matching rotation(SeedPartition::no_seeds(4), {1, 2, 3, 0});
    REQUIRE(full_disagreements(star, star, rotation) == 4);
    REQUIRE(full_alignment_strength(star, star, rotation) ==
            Catch::Approx(-1.0 / 3.0).margin(1e-12));

    Rng rng = make_rng(31415);
    for (int t = 0; t < 200; ++t) {
        const int nt = 4 + static_cast<int>(uniform_below(rng, 5));
        Graph g1 = random_graph(nt, 0.5, rng);
        Graph g2 = random_graph(nt, 0.5, rng);
        Matching m = random_matching(SeedPartition::no_seeds(nt), rng);
        const double d1 = full_density(g1), d2 = full_density(g2);
        if (d1 * (1 - d2) + (1 - d1) * d2 == 0.0) continue;
        REQUIRE(full_alignment_strength(g1, g2, m) <= 1.0 + 1e-12);
    }
}

TEST_CASE("match ratio") {
    SeedPartition p = SeedPartition::no_seeds(10);
    Matching truth = Matching::identity(p);
    REQUIRE(match_ratio(truth, truth) == 1.0);

    // full derangement
    std::vector<int> rot(10);
    for (int i = 0; i < 10; ++i) rot[i] = (i + 1) % 10;
    REQUIRE(match_ratio(Matching(p, rot), truth) == 0.0);

    // 3 of 10 agree: fix 0,1,2 and derange the rest
    std::vector<int> part = {0, 1, 2, 4, 5, 6, 7, 8, 9, 3};
    REQUIRE(match_ratio(Matching(p, part), truth) == Catch::Approx(0.3));

    SeedPartition other(10, {{0, 0}});
    REQUIRE_THROWS_AS(match_ratio(Matching::identity(other), truth), ContractError);

    Rng rng = make_rng(5);
    for (int t = 0; t < 10; ++t) {
        Matching m = random_matching(random_partition(8, 2, rng), rng);
        REQUIRE(match_ratio(m, m) == 1.0);
    }
}
