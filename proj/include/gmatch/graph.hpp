#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gmatch/errors.hpp"

namespace gmatch {

inline long long choose2(long long n) { return n * (n - 1) / 2; }

// Simple undirected graph on vertices 0..n-1. Adjacency is a packed symmetric
// bit matrix so disagreement counts reduce to XOR + popcount over rows.
class Graph {
public:
    Graph() = default;

    explicit Graph(int n_vertices) {
        if (n_vertices < 0) throw ContractError("Graph: negative vertex count");
        n_ = n_vertices;
        words_ = (n_ + 63) / 64;
        bits_.assign(static_cast<std::size_t>(n_) * words_, 0);
    }

    Graph(int n_vertices, std::span<const std::pair<int, int>> edges) : Graph(n_vertices) {
        for (auto [u, v] : edges) add_edge(u, v);
    }

    static Graph complete(int n_vertices) {
        Graph g(n_vertices);
        for (int u = 0; u < n_vertices; ++u)
            for (int v = u + 1; v < n_vertices; ++v) g.add_edge(u, v);
        return g;
    }

    int n_vertices() const { return n_; }
    long long edge_count() const { return edges_; }
    int row_words() const { return words_; }

    bool has_edge(int u, int v) const {
        check_vertex(u);
        check_vertex(v);
        if (u == v) return false;
        return (row(u)[v >> 6] >> (v & 63)) & 1ULL;
    }

    // Unchecked variant for solver inner loops.
    bool adj(int u, int v) const noexcept {
        return (row(u)[v >> 6] >> (v & 63)) & 1ULL;
    }

    // Build-phase mutation; a finished graph is treated as immutable.
    void add_edge(int u, int v) {
        check_vertex(u);
        check_vertex(v);
        if (u == v) throw ContractError("Graph: self-loops are not allowed");
        if (!test(u, v)) {
            set(u, v);
            set(v, u);
            ++edges_;
        }
    }

    long long degree(int u) const {
        check_vertex(u);
        long long d = 0;
        const std::uint64_t* r = row(u);
        for (int w = 0; w < words_; ++w) d += std::popcount(r[w]);
        return d;
    }

    const std::uint64_t* row(int u) const { return bits_.data() + static_cast<std::size_t>(u) * words_; }

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(static_cast<std::size_t>(edges_));
        for (int u = 0; u < n_; ++u)
            for (int v = u + 1; v < n_; ++v)
                if (test(u, v)) out.emplace_back(u, v);
        return out;
    }

    bool operator==(const Graph& other) const {
        return n_ == other.n_ && bits_ == other.bits_;
    }

private:
    void check_vertex(int v) const {
        if (v < 0 || v >= n_) throw ContractError("Graph: vertex index out of range");
    }
    bool test(int u, int v) const { return (row_mut(u)[v >> 6] >> (v & 63)) & 1ULL; }
    void set(int u, int v) { row_mut(u)[v >> 6] |= 1ULL << (v & 63); }
    const std::uint64_t* row_mut(int u) const { return bits_.data() + static_cast<std::size_t>(u) * words_; }
    std::uint64_t* row_mut(int u) { return bits_.data() + static_cast<std::size_t>(u) * words_; }

    int n_ = 0;
    int words_ = 0;
    long long edges_ = 0;
    std::vector<std::uint64_t> bits_;
};

// Partition of the n_total vertices of each graph into s seed pairs (known
// correspondence) and n nonseeds per side. Nonseed lists are the ascending
// complements of the seed coordinates.
class SeedPartition {
public:
    SeedPartition(int n_total, std::vector<std::pair<int, int>> seed_pairs) {
        if (n_total <= 0) throw ContractError("SeedPartition: n_total must be positive");
        n_total_ = n_total;
        std::sort(seed_pairs.begin(), seed_pairs.end());
        std::vector<char> used1(n_total, 0), used2(n_total, 0);
        for (auto [a, b] : seed_pairs) {
            if (a < 0 || a >= n_total || b < 0 || b >= n_total)
                throw ContractError("SeedPartition: seed vertex out of range");
            if (used1[a]) throw ContractError("SeedPartition: duplicate seed in first coordinate");
            if (used2[b]) throw ContractError("SeedPartition: duplicate seed in second coordinate");
            used1[a] = used2[b] = 1;
        }
        seed_pairs_ = std::move(seed_pairs);
        nonseeds1_.reserve(n_total - seed_pairs_.size());
        nonseeds2_.reserve(n_total - seed_pairs_.size());
        for (int v = 0; v < n_total; ++v) {
            if (!used1[v]) nonseeds1_.push_back(v);
            if (!used2[v]) nonseeds2_.push_back(v);
        }
    }

    static SeedPartition no_seeds(int n_total) { return SeedPartition(n_total, {}); }

    int n_total() const { return n_total_; }
    int seed_count() const { return static_cast<int>(seed_pairs_.size()); }
    int nonseed_count() const { return static_cast<int>(nonseeds1_.size()); }
    const std::vector<std::pair<int, int>>& seed_pairs() const { return seed_pairs_; }
    const std::vector<int>& nonseeds1() const { return nonseeds1_; }
    const std::vector<int>& nonseeds2() const { return nonseeds2_; }

    // The same partition viewed with the graph roles exchanged.
    SeedPartition swapped() const {
        std::vector<std::pair<int, int>> rev(seed_pairs_.size());
        for (std::size_t i = 0; i < seed_pairs_.size(); ++i)
            rev[i] = {seed_pairs_[i].second, seed_pairs_[i].first};
        return SeedPartition(n_total_, std::move(rev));
    }

    bool operator==(const SeedPartition& other) const {
        return n_total_ == other.n_total_ && seed_pairs_ == other.seed_pairs_;
    }

private:
    int n_total_ = 0;
    std::vector<std::pair<int, int>> seed_pairs_;
    std::vector<int> nonseeds1_, nonseeds2_;
};

// A seed-respecting bijection V1 -> V2: seeds map to their partners, nonseed i
// of side 1 maps to nonseed assignment[i] of side 2.
class Matching {
public:
    Matching(SeedPartition partition, std::vector<int> assignment)
        : partition_(std::move(partition)), assignment_(std::move(assignment)) {
        const int n = partition_.nonseed_count();
        if (static_cast<int>(assignment_.size()) != n)
            throw ContractError("Matching: assignment size does not match nonseed count");
        std::vector<char> hit(n, 0);
        for (int j : assignment_) {
            if (j < 0 || j >= n) throw ContractError("Matching: assignment index out of range");
            if (hit[j]) throw ContractError("Matching: assignment is not a bijection");
            hit[j] = 1;
        }
    }

    // Identity correspondence; requires both nonseed vertex lists to coincide.
    static Matching identity(const SeedPartition& partition) {
        if (partition.nonseeds1() != partition.nonseeds2())
            throw ContractError("Matching::identity: nonseed vertex sets differ");
        std::vector<int> id(partition.nonseed_count());
        for (int i = 0; i < partition.nonseed_count(); ++i) id[i] = i;
        return Matching(partition, std::move(id));
    }

    const SeedPartition& partition() const { return partition_; }
    const std::vector<int>& assignment() const { return assignment_; }

    // Image in V2 of the i-th nonseed of side 1.
    int nonseed_image(int i) const { return partition_.nonseeds2()[assignment_[i]]; }

    // The full vertex map V1 -> V2 (seeds included).
    std::vector<int> vertex_map() const {
        std::vector<int> phi(partition_.n_total(), -1);
        for (auto [a, b] : partition_.seed_pairs()) phi[a] = b;
        const auto& ns1 = partition_.nonseeds1();
        for (std::size_t i = 0; i < ns1.size(); ++i) phi[ns1[i]] = nonseed_image(static_cast<int>(i));
        return phi;
    }

    Matching inverse() const {
        std::vector<int> inv(assignment_.size());
        for (std::size_t i = 0; i < assignment_.size(); ++i) inv[assignment_[i]] = static_cast<int>(i);
        return Matching(partition_.swapped(), std::move(inv));
    }

    bool operator==(const Matching& other) const {
        return partition_ == other.partition_ && assignment_ == other.assignment_;
    }

private:
    SeedPartition partition_;
    std::vector<int> assignment_;
};

namespace detail {

inline void check_match_sizes(const Graph& g1, const Graph& g2, const Matching& m) {
    if (g1.n_vertices() != g2.n_vertices() || g1.n_vertices() != m.partition().n_total())
        throw ContractError("graph/matching size mismatch");
}

// Adjacency of g2 pulled back through phi: row u, bit v  <=>  phi(u) ~ phi(v).
inline std::vector<std::uint64_t> pullback_rows(const Graph& g2, const std::vector<int>& phi) {
    const int n = g2.n_vertices();
    const int words = g2.row_words();
    std::vector<std::uint64_t> out(static_cast<std::size_t>(n) * words, 0);
    for (int u = 0; u < n; ++u) {
        const std::uint64_t* src = g2.row(phi[u]);
        std::uint64_t* dst = out.data() + static_cast<std::size_t>(u) * words;
        for (int v = 0; v < n; ++v)
            if ((src[phi[v] >> 6] >> (phi[v] & 63)) & 1ULL) dst[v >> 6] |= 1ULL << (v & 63);
    }
    return out;
}

}  // namespace detail

// Number of unordered vertex pairs of V1 (seeds included) whose adjacency
// differs between g1 and g2 under the matching.
inline long long full_disagreements(const Graph& g1, const Graph& g2, const Matching& m) {
    detail::check_match_sizes(g1, g2, m);
    const int n = g1.n_vertices();
    const int words = g1.row_words();
    const auto phi = m.vertex_map();
    const auto pulled = detail::pullback_rows(g2, phi);
    long long twice = 0;
    for (int u = 0; u < n; ++u) {
        const std::uint64_t* a = g1.row(u);
        const std::uint64_t* b = pulled.data() + static_cast<std::size_t>(u) * words;
        for (int w = 0; w < words; ++w) twice += std::popcount(a[w] ^ b[w]);
    }
    return twice / 2;
}

// Same count restricted to pairs with both endpoints nonseeds.
inline long long restricted_disagreements(const Graph& g1, const Graph& g2, const Matching& m) {
    detail::check_match_sizes(g1, g2, m);
    const int words = g1.row_words();
    const auto phi = m.vertex_map();
    const auto pulled = detail::pullback_rows(g2, phi);
    std::vector<std::uint64_t> mask(words, 0);
    for (int v : m.partition().nonseeds1()) mask[v >> 6] |= 1ULL << (v & 63);
    long long twice = 0;
    for (int u : m.partition().nonseeds1()) {
        const std::uint64_t* a = g1.row(u);
        const std::uint64_t* b = pulled.data() + static_cast<std::size_t>(u) * words;
        for (int w = 0; w < words; ++w) twice += std::popcount((a[w] ^ b[w]) & mask[w]);
    }
    return twice / 2;
}

inline double full_density(const Graph& g) {
    if (g.n_vertices() < 2) throw UndefinedDensityError("full_density: need at least 2 vertices");
    return static_cast<double>(g.edge_count()) / static_cast<double>(choose2(g.n_vertices()));
}

// Density of the subgraph induced on the nonseeds of the given side (1 or 2).
inline double restricted_density(const Graph& g, const SeedPartition& p, int side) {
    if (side != 1 && side != 2) throw ContractError("restricted_density: side must be 1 or 2");
    if (g.n_vertices() != p.n_total()) throw ContractError("restricted_density: size mismatch");
    const auto& ns = side == 1 ? p.nonseeds1() : p.nonseeds2();
    const int n = static_cast<int>(ns.size());
    if (n < 2) throw UndefinedDensityError("restricted_density: need at least 2 nonseeds");
    long long edges = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (g.has_edge(ns[i], ns[j])) ++edges;
    return static_cast<double>(edges) / static_cast<double>(choose2(n));
}

namespace detail {

inline double strength_from(double disagreements, long long pairs, double d1, double d2) {
    const double denom = d1 * (1.0 - d2) + (1.0 - d1) * d2;
    if (denom == 0.0) throw DegenerateStrengthError(d1, d2);
    return 1.0 - (disagreements / static_cast<double>(pairs)) / denom;
}

}  // namespace detail

// Closed-form strength from summary counts: `disagreements` mismatches out of
// `pairs` unordered pairs, between graphs of the given densities.
inline double alignment_strength_from_counts(double disagreements, long long pairs, double density1,
                                             double density2) {
    if (pairs <= 0) throw ContractError("alignment_strength_from_counts: need at least one pair");
    return detail::strength_from(disagreements, pairs, density1, density2);
}

// Closed form for 1 - D(phi) / mean_{phi in Pi^S} D(phi). May be negative when
// the matching disagrees more than an average bijection; never exceeds 1.
inline double restricted_alignment_strength(const Graph& g1, const Graph& g2, const Matching& m) {
    const auto& p = m.partition();
    const int n = p.nonseed_count();
    if (n < 2) throw UndefinedDensityError("restricted_alignment_strength: need at least 2 nonseeds");
    const double d1 = restricted_density(g1, p, 1);
    const double d2 = restricted_density(g2, p, 2);
    const auto dis = restricted_disagreements(g1, g2, m);
    return detail::strength_from(static_cast<double>(dis), choose2(n), d1, d2);
}

// Closed form for 1 - D'(phi) / mean_{phi in Pi} D'(phi), seeds included.
inline double full_alignment_strength(const Graph& g1, const Graph& g2, const Matching& m) {
    detail::check_match_sizes(g1, g2, m);
    const double d1 = full_density(g1);
    const double d2 = full_density(g2);
    const auto dis = full_disagreements(g1, g2, m);
    return detail::strength_from(static_cast<double>(dis), choose2(g1.n_vertices()), d1, d2);
}

// Fraction of nonseeds mapped identically by the two matchings.
inline double match_ratio(const Matching& m, const Matching& truth) {
    if (!(m.partition() == truth.partition()))
        throw ContractError("match_ratio: matchings have different seed partitions");
    const int n = m.partition().nonseed_count();
    if (n == 0) return 1.0;
    int agree = 0;
    for (int i = 0; i < n; ++i)
        if (m.assignment()[i] == truth.assignment()[i]) ++agree;
    return static_cast<double>(agree) / static_cast<double>(n);
}

}  // namespace gmatch
