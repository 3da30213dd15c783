#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gmatch/errors.hpp"
#include "gmatch/graph.hpp"
#include "gmatch/numfmt.hpp"
#include "gmatch/rng.hpp"

namespace gmatch {

// ---------------------------------------------------------------------------
// Bernoulli-parameter distributions
// ---------------------------------------------------------------------------

struct PointMass {
    double p = 0.5;
    bool operator==(const PointMass&) const = default;
};

struct UniformInterval {
    double lo = 0.0, hi = 1.0;
    bool operator==(const UniformInterval&) const = default;
};

// delta * Beta(alpha, beta) + mu - delta * alpha / (alpha + beta):
// support interval of length delta, mean mu.
struct ScaledBeta {
    double alpha = 1.0, beta = 1.0, delta = 0.0, mu = 0.5;
    bool operator==(const ScaledBeta&) const = default;
};

struct Empirical {
    std::vector<double> values;
    bool operator==(const Empirical&) const = default;
};

using ParamDistribution = std::variant<PointMass, UniformInterval, ScaledBeta, Empirical>;

// Largest support length keeping delta*Beta(alpha,beta) + mu - delta*alpha/(alpha+beta)
// inside [0,1].
inline double scaled_beta_delta_max(double alpha, double beta, double mu) {
    return std::min((alpha + beta) / alpha * mu, (alpha + beta) / beta * (1.0 - mu));
}

inline void validate(const ParamDistribution& dist) {
    struct Checker {
        void operator()(const PointMass& d) const {
            if (!(d.p >= 0.0 && d.p <= 1.0)) throw SpecError("point mass outside [0,1]");
        }
        void operator()(const UniformInterval& d) const {
            if (!(0.0 <= d.lo && d.lo <= d.hi && d.hi <= 1.0))
                throw SpecError("uniform interval not contained in [0,1]");
        }
        void operator()(const ScaledBeta& d) const {
            if (!(d.alpha > 0.0) || !(d.beta > 0.0)) throw SpecError("Beta shape parameters must be positive");
            if (!(d.mu >= 0.0 && d.mu <= 1.0)) throw SpecError("scaled-Beta mean outside [0,1]");
            if (!(d.delta >= 0.0)) throw SpecError("scaled-Beta delta must be nonnegative");
            if (d.delta > scaled_beta_delta_max(d.alpha, d.beta, d.mu) + 1e-12)
                throw SpecError("scaled-Beta support exceeds [0,1] (delta > delta_max)");
        }
        void operator()(const Empirical& d) const {
            if (d.values.empty()) throw SpecError("empirical distribution has no values");
            for (double v : d.values)
                if (!(v >= 0.0 && v <= 1.0)) throw SpecError("empirical value outside [0,1]");
        }
    };
    std::visit(Checker{}, dist);
}

struct DistStats {
    double mean = 0.0;
    double variance = 0.0;
    double rho = 0.0;  // sigma^2 / (mu (1 - mu))
};

// Closed-form moments; heterogeneity correlation of the distribution.
inline DistStats distribution_stats(const ParamDistribution& dist) {
    validate(dist);
    DistStats st;
    if (const auto* pm = std::get_if<PointMass>(&dist)) {
        st.mean = pm->p;
        st.variance = 0.0;
    } else if (const auto* un = std::get_if<UniformInterval>(&dist)) {
        st.mean = 0.5 * (un->lo + un->hi);
        st.variance = (un->hi - un->lo) * (un->hi - un->lo) / 12.0;
    } else if (const auto* sb = std::get_if<ScaledBeta>(&dist)) {
        st.mean = sb->mu;
        const double ab = sb->alpha + sb->beta;
        st.variance = sb->delta * sb->delta * sb->alpha * sb->beta / (ab * ab * (ab + 1.0));
    } else {
        const auto& vals = std::get<Empirical>(dist).values;
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        var /= static_cast<double>(vals.size());
        st.mean = mean;
        st.variance = var;
    }
    if (st.mean <= 0.0 || st.mean >= 1.0)
        throw DegenerateMeanError("distribution mean is 0 or 1; heterogeneity correlation undefined");
    st.rho = st.variance / (st.mean * (1.0 - st.mean));
    return st;
}

// One draw. Beta variates use the two-Gamma construction.
template <class Urbg>
double sample_param(const ParamDistribution& dist, Urbg& g) {
    if (const auto* pm = std::get_if<PointMass>(&dist)) return pm->p;
    if (const auto* un = std::get_if<UniformInterval>(&dist))
        return un->lo + uniform01(g) * (un->hi - un->lo);
    if (const auto* sb = std::get_if<ScaledBeta>(&dist)) {
        if (sb->delta == 0.0) return sb->mu;
        double x = std::gamma_distribution<double>(sb->alpha, 1.0)(g);
        double y = std::gamma_distribution<double>(sb->beta, 1.0)(g);
        double b = (x + y > 0.0) ? x / (x + y) : 0.5;
        double p = sb->delta * b + sb->mu - sb->delta * sb->alpha / (sb->alpha + sb->beta);
        return std::min(1.0, std::max(0.0, p));
    }
    const auto& vals = std::get<Empirical>(dist).values;
    return vals[uniform_below(g, vals.size())];
}

inline std::string describe(const ParamDistribution& dist) {
    if (const auto* pm = std::get_if<PointMass>(&dist)) return "pointmass(p=" + format_double(pm->p) + ")";
    if (const auto* un = std::get_if<UniformInterval>(&dist))
        return "uniform(lo=" + format_double(un->lo) + ";hi=" + format_double(un->hi) + ")";
    if (const auto* sb = std::get_if<ScaledBeta>(&dist))
        return "scaledbeta(alpha=" + format_double(sb->alpha) + ";beta=" + format_double(sb->beta) +
               ";delta=" + format_double(sb->delta) + ";mu=" + format_double(sb->mu) + ")";
    return "empirical(k=" + std::to_string(std::get<Empirical>(dist).values.size()) + ")";
}

// ---------------------------------------------------------------------------
// Block model
// ---------------------------------------------------------------------------

class BlockModelSpec {
public:
    BlockModelSpec(std::vector<double> pi, std::vector<std::vector<ParamDistribution>> dists)
        : pi_(std::move(pi)), dists_(std::move(dists)) {
        const std::size_t k = pi_.size();
        if (k == 0) throw SpecError("block model needs at least one block");
        double total = 0.0;
        for (double p : pi_) {
            if (p < 0.0) throw SpecError("block probabilities must be nonnegative");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) throw SpecError("block probabilities must sum to 1");
        if (dists_.size() != k) throw SpecError("block distribution table is not K x K");
        for (const auto& row : dists_) {
            if (row.size() != k) throw SpecError("block distribution table is not K x K");
            for (const auto& d : row) validate(d);
        }
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j)
                if (!(dists_[i][j] == dists_[j][i]))
                    throw SpecError("block distribution table is not symmetric");
    }

    static BlockModelSpec point_masses(std::vector<double> pi,
                                       const std::vector<std::vector<double>>& means) {
        std::vector<std::vector<ParamDistribution>> table;
        table.reserve(means.size());
        for (const auto& row : means) {
            std::vector<ParamDistribution> drow;
            drow.reserve(row.size());
            for (double m : row) drow.push_back(PointMass{m});
            table.push_back(std::move(drow));
        }
        return BlockModelSpec(std::move(pi), std::move(table));
    }

    int block_count() const { return static_cast<int>(pi_.size()); }
    const std::vector<double>& pi() const { return pi_; }
    const ParamDistribution& dist(int i, int j) const { return dists_[i][j]; }

    std::vector<std::vector<double>> means() const {
        std::vector<std::vector<double>> m(pi_.size(), std::vector<double>(pi_.size()));
        for (std::size_t i = 0; i < pi_.size(); ++i)
            for (std::size_t j = 0; j < pi_.size(); ++j) m[i][j] = distribution_stats(dists_[i][j]).mean;
        return m;
    }

    // E[p_{u,v}] over blocks, the block analogue of mu'.
    double expected_mean() const {
        double mu = 0.0;
        for (std::size_t i = 0; i < pi_.size(); ++i)
            for (std::size_t j = 0; j < pi_.size(); ++j)
                mu += pi_[i] * pi_[j] * distribution_stats(dists_[i][j]).mean;
        return mu;
    }

private:
    std::vector<double> pi_;
    std::vector<std::vector<ParamDistribution>> dists_;
};

// ---------------------------------------------------------------------------
// Bernoulli parameter matrices
// ---------------------------------------------------------------------------

// Symmetric matrix of per-pair edge probabilities. Either materialized as a
// flat upper triangle (C(n,2) doubles, ~64 MB at n = 4000) or kept lazy: each
// entry is re-derived on demand from a counter-based per-pair substream, for
// instances where the dense matrix is too large. Both modes produce identical
// values for the same sampling seed. Moments are fixed at construction, so a
// finished object is immutable and safe to share across threads.
class BernoulliParams {
public:
    static BernoulliParams from_matrix(int n_vertices, std::vector<double> upper_tri) {
        if (static_cast<long long>(upper_tri.size()) != choose2(n_vertices))
            throw ContractError("BernoulliParams: triangle size does not match vertex count");
        for (double p : upper_tri)
            if (!(p >= 0.0 && p <= 1.0)) throw SpecError("Bernoulli parameter outside [0,1]");
        BernoulliParams out;
        out.n_ = n_vertices;
        out.store_ = Dense{std::move(upper_tri)};
        out.compute_moments();
        return out;
    }

    double at(int u, int v) const {
        if (u == v) throw ContractError("BernoulliParams: diagonal is unused");
        if (u > v) std::swap(u, v);
        const long long idx = pair_index(u, v);
        if (const auto* d = std::get_if<Dense>(&store_)) return d->tri[static_cast<std::size_t>(idx)];
        if (const auto* l = std::get_if<LazyIid>(&store_)) {
            SplitMix64 g(derive_seed(l->seed, static_cast<std::uint64_t>(idx)));
            return sample_param(l->dist, g);
        }
        const auto& l = std::get<LazyBlock>(store_);
        SplitMix64 g(derive_seed(l.seed, static_cast<std::uint64_t>(idx)));
        return sample_param(l.spec.dist(labels_[u], labels_[v]), g);
    }

    int n_vertices() const { return n_; }
    long long pair_count() const { return choose2(n_); }
    double mean() const { return mean_; }
    double variance() const { return variance_; }
    bool materialized() const { return std::holds_alternative<Dense>(store_); }

    // Block labels when sampled from a block model; empty otherwise.
    const std::vector<int>& labels() const { return labels_; }

private:
    friend BernoulliParams sample_params(const ParamDistribution&, int, Rng&, bool);
    friend BernoulliParams sample_params(const BlockModelSpec&, int, Rng&, bool);

    struct Dense {
        std::vector<double> tri;
    };
    struct LazyIid {
        ParamDistribution dist;
        std::uint64_t seed;
    };
    struct LazyBlock {
        BlockModelSpec spec;
        std::uint64_t seed;
    };

    BernoulliParams() = default;

    long long pair_index(int u, int v) const {
        return static_cast<long long>(u) * n_ - static_cast<long long>(u) * (u + 1) / 2 + (v - u - 1);
    }

    void compute_moments() {
        double mean = 0.0, m2 = 0.0;
        long long count = 0;
        for (int u = 0; u < n_; ++u)
            for (int v = u + 1; v < n_; ++v) {
                const double x = at(u, v);
                ++count;
                const double delta = x - mean;
                mean += delta / static_cast<double>(count);
                m2 += delta * (x - mean);
            }
        mean_ = count > 0 ? mean : 0.0;
        variance_ = count > 0 ? m2 / static_cast<double>(count) : 0.0;
    }

    int n_ = 0;
    std::variant<Dense, LazyIid, LazyBlock> store_;
    std::vector<int> labels_;
    double mean_ = 0.0;
    double variance_ = 0.0;
};

// Every pair's parameter drawn independently from the distribution. The draw
// for pair {u,v} comes from a substream keyed by the pair index, so the dense
// and lazy modes realize identical matrices for the same generator state.
inline BernoulliParams sample_params(const ParamDistribution& dist, int n_vertices, Rng& rng,
                                     bool materialize = true) {
    validate(dist);
    if (n_vertices < 1) throw ContractError("sample_params: need at least one vertex");
    const std::uint64_t seed = rng();
    BernoulliParams out;
    out.n_ = n_vertices;
    if (materialize) {
        std::vector<double> tri;
        tri.reserve(static_cast<std::size_t>(choose2(n_vertices)));
        long long idx = 0;
        for (int u = 0; u < n_vertices; ++u)
            for (int v = u + 1; v < n_vertices; ++v, ++idx) {
                SplitMix64 g(derive_seed(seed, static_cast<std::uint64_t>(idx)));
                tri.push_back(sample_param(dist, g));
            }
        out.store_ = BernoulliParams::Dense{std::move(tri)};
    } else {
        out.store_ = BernoulliParams::LazyIid{dist, seed};
    }
    out.compute_moments();
    return out;
}

// Block-model version: labels drawn i.i.d. from pi first, then p_{u,v} from
// the distribution of the block pair.
inline BernoulliParams sample_params(const BlockModelSpec& spec, int n_vertices, Rng& rng,
                                     bool materialize = true) {
    if (n_vertices < 1) throw ContractError("sample_params: need at least one vertex");
    const int k = spec.block_count();
    std::vector<double> cum(spec.pi());
    for (int i = 1; i < k; ++i) cum[i] += cum[i - 1];
    std::vector<int> labels(n_vertices);
    for (int v = 0; v < n_vertices; ++v) {
        const double x = uniform01(rng);
        int b = 0;
        while (b + 1 < k && x >= cum[b]) ++b;
        labels[v] = b;
    }
    const std::uint64_t seed = rng();
    BernoulliParams out;
    out.n_ = n_vertices;
    out.labels_ = labels;
    if (materialize) {
        std::vector<double> tri;
        tri.reserve(static_cast<std::size_t>(choose2(n_vertices)));
        long long idx = 0;
        for (int u = 0; u < n_vertices; ++u)
            for (int v = u + 1; v < n_vertices; ++v, ++idx) {
                SplitMix64 g(derive_seed(seed, static_cast<std::uint64_t>(idx)));
                tri.push_back(sample_param(spec.dist(labels[u], labels[v]), g));
            }
        out.store_ = BernoulliParams::Dense{std::move(tri)};
    } else {
        out.store_ = BernoulliParams::LazyBlock{spec, seed};
    }
    out.compute_moments();
    return out;
}

// sigma^2 / (mu (1 - mu)) of the realized parameter matrix.
inline double heterogeneity_correlation(const BernoulliParams& params) {
    const double mu = params.mean();
    if (mu <= 0.0 || mu >= 1.0)
        throw DegenerateMeanError("heterogeneity correlation undefined: parameter mean is 0 or 1");
    const double rho = params.variance() / (mu * (1.0 - mu));
    return std::min(1.0, std::max(0.0, rho));
}

// 1 - (1 - rho_h)(1 - rho_e).
inline double total_correlation(double rho_h, double rho_e) {
    if (!(rho_h >= 0.0 && rho_h <= 1.0 && rho_e >= 0.0 && rho_e <= 1.0))
        throw ContractError("total_correlation: inputs must lie in [0,1]");
    return 1.0 - (1.0 - rho_h) * (1.0 - rho_e);
}

// ---------------------------------------------------------------------------
// Correlated pair sampling
// ---------------------------------------------------------------------------

// Joint adjacency-cell probabilities for one pair, conditioned on its
// Bernoulli parameter p and the edge correlation rho_e:
//
//              v ~ G2          v !~ G2
//   u ~ G1     p^2 + r p(1-p)  (1-r) p(1-p)
//   u !~ G1    (1-r) p(1-p)    (1-p)^2 + r p(1-p)
struct JointCellProbs {
    double both;        // edge in both graphs
    double only_first;  // edge in G1 only
    double only_second; // edge in G2 only
    double neither;
};

inline JointCellProbs joint_cell_probs(double p, double rho_e) {
    if (!(p >= 0.0 && p <= 1.0)) throw ContractError("joint_cell_probs: p must lie in [0,1]");
    if (!(rho_e >= 0.0 && rho_e <= 1.0)) throw ContractError("joint_cell_probs: rho_e must lie in [0,1]");
    const double cross = (1.0 - rho_e) * p * (1.0 - p);
    return JointCellProbs{
        p * p + rho_e * p * (1.0 - p),
        cross,
        cross,
        (1.0 - p) * (1.0 - p) + rho_e * p * (1.0 - p),
    };
}

struct CorrelatedPairSpec {
    int n = 0;               // nonseeds
    int s = 0;               // seeds
    double edge_corr = 0.0;  // rho_e
    std::variant<ParamDistribution, BlockModelSpec, BernoulliParams> source = PointMass{0.5};
    bool materialize_params = true;

    int total_vertices() const { return n + s; }

    void check() const {
        if (n < 0 || s < 0 || n + s < 2) throw SpecError("correlated pair needs n + s >= 2");
        if (!(edge_corr >= 0.0 && edge_corr <= 1.0)) throw SpecError("edge correlation must lie in [0,1]");
        if (const auto* d = std::get_if<ParamDistribution>(&source)) validate(*d);
        if (const auto* p = std::get_if<BernoulliParams>(&source))
            if (p->n_vertices() != n + s) throw SpecError("explicit parameter matrix size mismatch");
    }
};

struct CorrelatedPair {
    Graph g1, g2;
    SeedPartition partition;
    Matching truth;
    BernoulliParams params;
};

// Draw (G1, G2) with shared Bernoulli parameters and paired edge indicators
// correlated at rho_e; the true correspondence is the identity, and s seeds
// are chosen uniformly without replacement.
inline CorrelatedPair sample_correlated_pair(const CorrelatedPairSpec& spec, Rng& rng) {
    spec.check();
    const int nt = spec.total_vertices();
    const double rho = spec.edge_corr;

    BernoulliParams params = std::visit(
        [&](const auto& src) -> BernoulliParams {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, BernoulliParams>)
                return src;
            else
                return sample_params(src, nt, rng, spec.materialize_params);
        },
        spec.source);

    Graph g1(nt), g2(nt);
    for (int u = 0; u < nt; ++u)
        for (int v = u + 1; v < nt; ++v) {
            const double p = params.at(u, v);
            const bool x1 = bernoulli(rng, p);
            const double p2 = x1 ? p + rho * (1.0 - p) : (1.0 - rho) * p;
            const bool x2 = bernoulli(rng, p2);
            if (x1) g1.add_edge(u, v);
            if (x2) g2.add_edge(u, v);
        }

    std::vector<int> seeds = sample_without_replacement(nt, spec.s, rng);
    std::vector<std::pair<int, int>> seed_pairs;
    seed_pairs.reserve(seeds.size());
    for (int v : seeds) seed_pairs.emplace_back(v, v);
    SeedPartition partition(nt, std::move(seed_pairs));
    Matching truth = Matching::identity(partition);
    return CorrelatedPair{std::move(g1), std::move(g2), std::move(partition), std::move(truth),
                          std::move(params)};
}

// ---------------------------------------------------------------------------
// Elementary generators
// ---------------------------------------------------------------------------

inline Graph erdos_renyi(int n_vertices, double p, Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw ContractError("erdos_renyi: p must lie in [0,1]");
    Graph g(n_vertices);
    for (int u = 0; u < n_vertices; ++u)
        for (int v = u + 1; v < n_vertices; ++v)
            if (bernoulli(rng, p)) g.add_edge(u, v);
    return g;
}

// Mixture of g and an independent density-matched Erdos-Renyi noise graph:
// each pair keeps g's adjacency with probability rho, otherwise takes the
// noise graph's.
inline Graph noised_rendition(const Graph& g, double rho, Rng& rng) {
    if (g.n_vertices() < 2) throw ContractError("noised_rendition: need at least 2 vertices");
    if (!(rho >= 0.0 && rho <= 1.0)) throw ContractError("noised_rendition: rho must lie in [0,1]");
    const double d = full_density(g);
    const int n = g.n_vertices();
    Graph out(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            const bool keep = bernoulli(rng, rho);
            const bool bit = keep ? g.has_edge(u, v) : bernoulli(rng, d);
            if (bit) out.add_edge(u, v);
        }
    return out;
}

}  // namespace gmatch
