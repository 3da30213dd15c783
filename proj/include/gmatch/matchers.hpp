#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "gmatch/assignment.hpp"
#include "gmatch/graph.hpp"
#include "gmatch/rng.hpp"

namespace gmatch {

enum class SgmInit { Barycenter, Identity, RandomDoublyStochastic };
enum class SolverKind { Exact, Sgm };

// Snapshot of one Frank-Wolfe step, for instrumentation and property tests.
struct SgmIterate {
    int iteration;
    double objective;    // QAP agreement objective after the step
    double step;         // line-search alpha
    double frob_change;  // ||P_new - P_old||_F
    const Eigen::MatrixXd& iterate;
};

struct SgmConfig {
    int max_iterations = 30;
    double convergence_tol = 0.05;  // stop when ||P_k+1 - P_k||_F < tol * sqrt(n)
    SgmInit initialization = SgmInit::Barycenter;
    int restarts = 0;                       // extra runs from random doubly stochastic starts
    std::uint64_t restart_seed = 0xC0FFEE;  // seeds the random starts; keeps restarts reproducible
    std::function<void(const SgmIterate&)> on_iterate;

    void check() const {
        if (max_iterations < 1) throw ContractError("SgmConfig: max_iterations must be >= 1");
        if (!(convergence_tol > 0.0)) throw ContractError("SgmConfig: convergence_tol must be positive");
        if (restarts < 0) throw ContractError("SgmConfig: restarts must be nonnegative");
    }
};

struct ExactConfig {
    int max_nonseeds = 14;
};

struct MatchResult {
    Matching matching;
    long long full_disagreements = 0;
    long long restricted_disagreements = 0;
    double restricted_strength = 0.0;  // NaN when fewer than 2 nonseeds
    double full_strength = 0.0;
    SolverKind solver = SolverKind::Sgm;
    long long iterations = 0;
    bool proven_optimal = false;
};

// Consistency shim: the solver-facing objective expressed through graph-core.
inline long long objective_from_disagreements(const Graph& g1, const Graph& g2, const Matching& m) {
    return full_disagreements(g1, g2, m);
}

namespace detail {

inline MatchResult finish_match_result(const Graph& g1, const Graph& g2, Matching m, SolverKind kind,
                                       long long iterations, bool proven) {
    MatchResult r{std::move(m)};
    r.solver = kind;
    r.iterations = iterations;
    r.proven_optimal = proven;
    r.full_disagreements = full_disagreements(g1, g2, r.matching);
    r.restricted_disagreements = restricted_disagreements(g1, g2, r.matching);
    r.full_strength = full_alignment_strength(g1, g2, r.matching);
    r.restricted_strength = r.matching.partition().nonseed_count() >= 2
                                ? restricted_alignment_strength(g1, g2, r.matching)
                                : std::numeric_limits<double>::quiet_NaN();
    return r;
}

// Packed square bit matrix on local indices.
struct BitMat {
    int n = 0, words = 0;
    std::vector<std::uint64_t> bits;

    explicit BitMat(int dim) : n(dim), words((dim + 63) / 64), bits(static_cast<std::size_t>(dim) * ((dim + 63) / 64), 0) {}
    void set(int i, int j) { bits[static_cast<std::size_t>(i) * words + (j >> 6)] |= 1ULL << (j & 63); }
    bool test(int i, int j) const {
        return (bits[static_cast<std::size_t>(i) * words + (j >> 6)] >> (j & 63)) & 1ULL;
    }
    const std::uint64_t* row(int i) const { return bits.data() + static_cast<std::size_t>(i) * words; }
};

// ---------------------------------------------------------------------------
// Branch and bound for the exact seeded matcher
// ---------------------------------------------------------------------------

class BranchAndBound {
public:
    BranchAndBound(const Graph& g1, const Graph& g2, const SeedPartition& p)
        : n_(p.nonseed_count()), a_(std::max(n_, 1)), b_(std::max(n_, 1)) {
        // Branch order: g1 nonseeds with the most edges first.
        rows_ = p.nonseeds1();
        std::sort(rows_.begin(), rows_.end(), [&](int x, int y) {
            long long dx = g1.degree(x), dy = g1.degree(y);
            return dx != dy ? dx > dy : x < y;
        });
        const auto& cols = p.nonseeds2();

        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                if (g1.adj(rows_[i], rows_[j]) && i != j) a_.set(i, j);
                if (g2.adj(cols[i], cols[j]) && i != j) b_.set(i, j);
            }

        const auto& seeds = p.seed_pairs();
        const int s = static_cast<int>(seeds.size());

        fixed_base_ = 0;
        for (int k = 0; k < s; ++k)
            for (int l = k + 1; l < s; ++l)
                fixed_base_ += g1.adj(seeds[k].first, seeds[l].first) !=
                               g2.adj(seeds[k].second, seeds[l].second);

        // Linear costs against the seeds: lin[i][j] = disagreements between
        // row i's seed adjacencies in g1 and column j's in g2.
        lin_.assign(static_cast<std::size_t>(n_) * std::max(n_, 1), 0.0);
        const int swords = std::max((s + 63) / 64, 1);
        std::vector<std::uint64_t> sb1(static_cast<std::size_t>(n_) * swords, 0);
        std::vector<std::uint64_t> sb2(static_cast<std::size_t>(n_) * swords, 0);
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < s; ++k) {
                if (g1.adj(rows_[i], seeds[k].first)) sb1[static_cast<std::size_t>(i) * swords + (k >> 6)] |= 1ULL << (k & 63);
                if (g2.adj(cols[i], seeds[k].second)) sb2[static_cast<std::size_t>(i) * swords + (k >> 6)] |= 1ULL << (k & 63);
            }
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                long long d = 0;
                for (int w = 0; w < swords; ++w)
                    d += std::popcount(sb1[static_cast<std::size_t>(i) * swords + w] ^
                                       sb2[static_cast<std::size_t>(j) * swords + w]);
                lin_[static_cast<std::size_t>(i) * n_ + j] = static_cast<double>(d);
            }

        cost_.resize(n_ + 1);
        colids_.resize(n_ + 1);
        for (int d = 0; d <= n_; ++d) {
            cost_[d].assign(static_cast<std::size_t>(n_ - d) * std::max(n_ - d, 1), 0.0);
            colids_[d].assign(n_ - d, 0);
        }
        partial_.assign(n_, -1);
        best_assign_.assign(n_, -1);
    }

    // Optimal local column per branch-order row, plus the node count.
    std::pair<std::vector<int>, long long> solve() {
        best_ = std::numeric_limits<double>::infinity();
        nodes_ = 0;
        if (n_ == 0) {
            best_ = 0.0;
        } else {
            cost_[0] = lin_;
            for (int j = 0; j < n_; ++j) colids_[0][j] = j;
            descend(0, 0.0);
        }
        return {best_assign_, nodes_};
    }

    const std::vector<int>& branch_rows() const { return rows_; }
    double best_objective() const { return static_cast<double>(fixed_base_) + best_; }

private:
    void descend(int depth, double fixed) {
        ++nodes_;
        const int m = n_ - depth;
        const auto& cols = colids_[depth];
        const auto& c = cost_[depth];

        // Lower bound: LAP over linear + assigned-pair costs; interactions
        // among unassigned rows relaxed to zero, hence admissible.
        Assignment lap = lap_min_rowmajor(c.data(), m);
        if (fixed + lap.objective >= best_) return;

        // The LAP solution extends the partial assignment to a feasible
        // matching; score it exactly to tighten the incumbent early.
        double completion = fixed + lap.objective;
        for (int r = 0; r < m; ++r)
            for (int r2 = r + 1; r2 < m; ++r2)
                completion += a_.test(depth + r, depth + r2) !=
                                      b_.test(cols[lap.perm[r]], cols[lap.perm[r2]])
                                  ? 1.0
                                  : 0.0;
        if (completion < best_) {
            best_ = completion;
            for (int i = 0; i < depth; ++i) best_assign_[i] = partial_[i];
            for (int r = 0; r < m; ++r) best_assign_[depth + r] = cols[lap.perm[r]];
        }
        if (m == 1) return;

        // Branch on the next row, cheapest columns first.
        std::vector<std::pair<double, int>> order(m);
        for (int j = 0; j < m; ++j) order[j] = {c[j], j};
        std::sort(order.begin(), order.end(), [&](const auto& x, const auto& y) {
            return x.first != y.first ? x.first < y.first : cols[x.second] < cols[y.second];
        });

        auto& child_cols = colids_[depth + 1];
        auto& child_cost = cost_[depth + 1];
        for (const auto& [base, j] : order) {
            const double child_fixed = fixed + base;
            if (child_fixed >= best_) break;  // sorted columns: the rest are no better
            const int cj = cols[j];
            int cc = 0;
            for (int col = 0; col < m; ++col)
                if (col != j) child_cols[cc++] = cols[col];
            for (int r = 1; r < m; ++r) {
                const bool e1 = a_.test(depth + r, depth);
                int cc2 = 0;
                for (int col = 0; col < m; ++col) {
                    if (col == j) continue;
                    child_cost[static_cast<std::size_t>(r - 1) * (m - 1) + cc2] =
                        c[static_cast<std::size_t>(r) * m + col] + (e1 != b_.test(cols[col], cj) ? 1.0 : 0.0);
                    ++cc2;
                }
            }
            partial_[depth] = cj;
            descend(depth + 1, child_fixed);
        }
    }

    int n_;
    BitMat a_, b_;  // nonseed adjacency in branch-order / ascending local indices
    std::vector<int> rows_;      // g1 nonseeds in branch order
    long long fixed_base_ = 0;
    std::vector<double> lin_;
    std::vector<std::vector<double>> cost_;
    std::vector<std::vector<int>> colids_;
    std::vector<int> partial_, best_assign_;
    double best_ = 0.0;
    long long nodes_ = 0;
};

}  // namespace detail

// Global minimizer of the full disagreement count over seed-respecting
// bijections, by depth-first branch and bound with an assignment-relaxation
// bound. Intended for small nonseed counts.
inline MatchResult exact_match(const Graph& g1, const Graph& g2, const SeedPartition& partition,
                               const ExactConfig& cfg = {}) {
    if (g1.n_vertices() != g2.n_vertices() || g1.n_vertices() != partition.n_total())
        throw ContractError("exact_match: graph/partition size mismatch");
    const int n = partition.nonseed_count();
    if (n > cfg.max_nonseeds)
        throw SizeLimitError("exact_match: " + std::to_string(n) + " nonseeds exceeds the exact limit of " +
                             std::to_string(cfg.max_nonseeds) + "; use sgm_match instead");

    detail::BranchAndBound bnb(g1, g2, partition);
    auto [by_row, nodes] = bnb.solve();

    // Convert the branch-order assignment to the ascending-nonseed convention.
    const auto& ns1 = partition.nonseeds1();
    std::vector<int> pos(partition.n_total(), -1);
    for (std::size_t i = 0; i < ns1.size(); ++i) pos[ns1[i]] = static_cast<int>(i);
    std::vector<int> perm(n, -1);
    for (int r = 0; r < n; ++r) perm[pos[bnb.branch_rows()[r]]] = by_row[r];

    return detail::finish_match_result(g1, g2, Matching(partition, std::move(perm)), SolverKind::Exact,
                                       nodes, true);
}

namespace detail {

inline Eigen::MatrixXd sinkhorn_random_ds(int n, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) m(i, j) = 0.5 + uniform01(rng);
    for (int it = 0; it < 5000; ++it) {
        for (int i = 0; i < n; ++i) m.row(i) /= m.row(i).sum();
        for (int j = 0; j < n; ++j) m.col(j) /= m.col(j).sum();
        double dev = 0.0;
        for (int i = 0; i < n; ++i) dev = std::max(dev, std::abs(m.row(i).sum() - 1.0));
        if (dev < 1e-13) break;
    }
    return m;
}

}  // namespace detail

// Frank-Wolfe ascent of the seeded QAP agreement objective
//
//   g(P) = tr(A11 B11) + 2 tr(A12 P B21) + tr(A22 P B22 P^T)
//
// over the doubly stochastic polytope on the nonseeds (blocks: 1 = seeds,
// 2 = nonseeds). Maximizing g over permutations is equivalent to minimizing
// the full disagreement count. Each iteration solves a max-LAP on the
// gradient, takes the closed-form optimal step of the univariate quadratic
// along the segment (ties toward the new vertex), and stops on a small
// iterate change or when no ascent direction remains. The relaxed solution is
// projected to a permutation by one final max-LAP.
inline MatchResult sgm_match(const Graph& g1, const Graph& g2, const SeedPartition& partition,
                             const SgmConfig& cfg = {}) {
    cfg.check();
    if (g1.n_vertices() != g2.n_vertices() || g1.n_vertices() != partition.n_total())
        throw ContractError("sgm_match: graph/partition size mismatch");

    const int n = partition.nonseed_count();
    const auto& seeds = partition.seed_pairs();
    const int s = partition.seed_count();

    if (n == 0)
        return detail::finish_match_result(g1, g2, Matching(partition, {}), SolverKind::Sgm, 0, false);

    const auto& ns1 = partition.nonseeds1();
    const auto& ns2 = partition.nonseeds2();

    Eigen::MatrixXd a22(n, n), b22(n, n), seed_lin = Eigen::MatrixXd::Zero(n, n);
    detail::BitMat abits(n), bbits(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const bool e1 = g1.adj(ns1[i], ns1[j]);
            const bool e2 = g2.adj(ns2[i], ns2[j]);
            a22(i, j) = e1 ? 1.0 : 0.0;
            b22(i, j) = e2 ? 1.0 : 0.0;
            if (e1) abits.set(i, j);
            if (e2) bbits.set(i, j);
        }

    // Seed cross terms: seed_lin(i, j) counts seeds adjacent to nonseed i in
    // g1 and to nonseed j in g2.
    if (s > 0) {
        const int swords = (s + 63) / 64;
        std::vector<std::uint64_t> sb1(static_cast<std::size_t>(n) * swords, 0);
        std::vector<std::uint64_t> sb2(static_cast<std::size_t>(n) * swords, 0);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < s; ++k) {
                if (g1.adj(ns1[i], seeds[k].first)) sb1[static_cast<std::size_t>(i) * swords + (k >> 6)] |= 1ULL << (k & 63);
                if (g2.adj(ns2[i], seeds[k].second)) sb2[static_cast<std::size_t>(i) * swords + (k >> 6)] |= 1ULL << (k & 63);
            }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                long long common = 0;
                for (int w = 0; w < swords; ++w)
                    common += std::popcount(sb1[static_cast<std::size_t>(i) * swords + w] &
                                            sb2[static_cast<std::size_t>(j) * swords + w]);
                seed_lin(i, j) = static_cast<double>(common);
            }
    }

    double const_term = 0.0;
    for (int k = 0; k < s; ++k)
        for (int l = 0; l < s; ++l)
            const_term += (g1.adj(seeds[k].first, seeds[l].first) &&
                           g2.adj(seeds[k].second, seeds[l].second))
                              ? 1.0
                              : 0.0;

    Eigen::MatrixXd p(n, n), w(n, n), g0(n, n), grad(n, n);
    std::vector<double> lapbuf(static_cast<std::size_t>(n) * n);

    std::vector<int> best_perm;
    long long best_iters = 0;
    long long best_dis = -1;

    const int runs = 1 + cfg.restarts;
    for (int run = 0; run < runs; ++run) {
        if (run == 0 && cfg.initialization == SgmInit::Barycenter)
            p.setConstant(1.0 / n);
        else if (run == 0 && cfg.initialization == SgmInit::Identity)
            p = Eigen::MatrixXd::Identity(n, n);
        else
            p = detail::sinkhorn_random_ds(n, derive_seed(cfg.restart_seed, static_cast<std::uint64_t>(run)));

        double objective = 0.0;
        long long iterations = 0;
        for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
            w.noalias() = p * b22;
            g0.noalias() = a22 * w;
            grad = seed_lin + g0;
            if (iter == 1)
                objective = const_term + 2.0 * seed_lin.cwiseProduct(p).sum() + g0.cwiseProduct(p).sum();

            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) lapbuf[static_cast<std::size_t>(i) * n + j] = grad(i, j);
            Assignment dir = detail::lap_max_rowmajor(lapbuf.data(), n);
            const std::vector<int>& q = dir.perm;

            double sum_q = 0.0;
            for (int i = 0; i < n; ++i) sum_q += grad(i, q[i]);
            const double ascent = 2.0 * (sum_q - grad.cwiseProduct(p).sum());
            if (ascent <= 1e-12) break;  // no ascent direction; P is a FW fixed point

            // Coefficients of the univariate quadratic along the segment.
            const double t_pp = g0.cwiseProduct(p).sum();
            double t_qq = 0.0, t_qp = 0.0;
            for (int i = 0; i < n; ++i) {
                const std::uint64_t* row = abits.row(i);
                const int qi = q[i];
                for (int wd = 0; wd < abits.words; ++wd) {
                    std::uint64_t bits = row[wd];
                    while (bits) {
                        const int m = (wd << 6) + std::countr_zero(bits);
                        bits &= bits - 1;
                        t_qq += bbits.test(qi, q[m]) ? 1.0 : 0.0;
                        t_qp += w(i, q[m]);
                    }
                }
            }
            const double quad = t_qq - 2.0 * t_qp + t_pp;
            const double alpha = quad < 0.0 ? std::min(1.0, ascent / (-2.0 * quad)) : 1.0;

            double dot_qp = 0.0;
            for (int i = 0; i < n; ++i) dot_qp += p(i, q[i]);
            const double frob_change =
                alpha * std::sqrt(std::max(0.0, p.squaredNorm() - 2.0 * dot_qp + n));

            objective += alpha * ascent + alpha * alpha * quad;
            p *= (1.0 - alpha);
            for (int i = 0; i < n; ++i) p(i, q[i]) += alpha;
            ++iterations;

            if (cfg.on_iterate) cfg.on_iterate(SgmIterate{iter, objective, alpha, frob_change, p});
            if (frob_change < cfg.convergence_tol * std::sqrt(static_cast<double>(n))) break;
        }

        // Project the relaxed solution to a permutation.
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) lapbuf[static_cast<std::size_t>(i) * n + j] = p(i, j);
        Assignment proj = detail::lap_max_rowmajor(lapbuf.data(), n);

        const long long dis = full_disagreements(g1, g2, Matching(partition, proj.perm));
        if (best_dis < 0 || dis < best_dis) {
            best_dis = dis;
            best_perm = proj.perm;
            best_iters = iterations;
        }
    }

    return detail::finish_match_result(g1, g2, Matching(partition, std::move(best_perm)), SolverKind::Sgm,
                                       best_iters, false);
}

}  // namespace gmatch
