#pragma once

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gmatch/matchers.hpp"
#include "gmatch/numfmt.hpp"
#include "gmatch/parallel.hpp"
#include "gmatch/phantom.hpp"
#include "gmatch/random_models.hpp"

namespace gmatch {

// ---------------------------------------------------------------------------
// Records and CSV
// ---------------------------------------------------------------------------

struct ExperimentRecord {
    std::string experiment_id;
    long long trial_index = 0;
    int n = 0;
    int s = 0;
    double mu_prime = 0.0;
    std::string dist_descriptor;
    double rho_e = 0.0;
    double rho_h_realized = 0.0;
    double rho_T = 0.0;
    double match_ratio = 0.0;
    double restricted_strength = 0.0;
    double full_strength = 0.0;
    std::string solver;
    long long iterations = 0;
    std::uint64_t rng_seed = 0;
    double wall_time_ms = 0.0;

    bool operator==(const ExperimentRecord&) const = default;
};

inline const char* csv_header() {
    return "experiment_id,trial_index,n,s,mu_prime,dist_descriptor,rho_e,rho_h_realized,rho_T,"
           "match_ratio,restricted_strength,full_strength,solver,iterations,rng_seed,wall_time_ms";
}

// Writes records in field order, one row per record. wall_time_ms is the only
// field not determined by the root seed; zero_timing replaces it with 0 so two
// runs with the same seed emit byte-identical files.
inline void emit_csv(const std::vector<ExperimentRecord>& records, const std::string& path,
                     bool zero_timing = false) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("emit_csv: cannot open '" + path + "' for writing");
    out << csv_header() << '\n';
    for (const auto& r : records) {
        out << r.experiment_id << ',' << r.trial_index << ',' << r.n << ',' << r.s << ','
            << format_double(r.mu_prime) << ',' << r.dist_descriptor << ',' << format_double(r.rho_e)
            << ',' << format_double(r.rho_h_realized) << ',' << format_double(r.rho_T) << ','
            << format_double(r.match_ratio) << ',' << format_double(r.restricted_strength) << ','
            << format_double(r.full_strength) << ',' << r.solver << ',' << r.iterations << ','
            << r.rng_seed << ',' << format_double(zero_timing ? 0.0 : r.wall_time_ms) << '\n';
    }
}

inline std::vector<ExperimentRecord> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("read_csv: cannot open '" + path + "'");
    std::string line;
    long long lineno = 0;
    if (!std::getline(in, line)) throw ParseError("read_csv: empty file", 1);
    ++lineno;
    if (line != csv_header()) throw ParseError("read_csv: unexpected header", 1);

    std::vector<ExperimentRecord> records;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        for (;;) {
            std::size_t pos = line.find(',', start);
            if (pos == std::string::npos) {
                f.push_back(line.substr(start));
                break;
            }
            f.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (f.size() != 16) throw ParseError("read_csv: expected 16 fields", lineno);
        ExperimentRecord r;
        r.experiment_id = f[0];
        r.trial_index = parse_int(f[1], lineno);
        r.n = static_cast<int>(parse_int(f[2], lineno));
        r.s = static_cast<int>(parse_int(f[3], lineno));
        r.mu_prime = parse_double(f[4], lineno);
        r.dist_descriptor = f[5];
        r.rho_e = parse_double(f[6], lineno);
        r.rho_h_realized = parse_double(f[7], lineno);
        r.rho_T = parse_double(f[8], lineno);
        r.match_ratio = parse_double(f[9], lineno);
        r.restricted_strength = parse_double(f[10], lineno);
        r.full_strength = parse_double(f[11], lineno);
        r.solver = f[12];
        r.iterations = parse_int(f[13], lineno);
        r.rng_seed = parse_uint64(f[14], lineno);
        r.wall_time_ms = parse_double(f[15], lineno);
        records.push_back(std::move(r));
    }
    return records;
}

// ---------------------------------------------------------------------------
// Edge-list and seed files
// ---------------------------------------------------------------------------

namespace detail {

inline bool blank(const std::string& s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

inline std::pair<long long, long long> parse_int_pair(const std::string& line, long long lineno) {
    std::istringstream ss(line);
    long long a, b;
    if (!(ss >> a >> b)) throw ParseError("expected two integers", lineno);
    std::string rest;
    if (ss >> rest) throw ParseError("trailing tokens after two integers", lineno);
    return {a, b};
}

}  // namespace detail

// Format: first line "N M", then M lines "u v" with 0-based vertex indices.
// Undirected; duplicate edges collapse; self-loops are rejected.
inline Graph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_edge_list: cannot open '" + path + "'");
    std::string line;
    long long lineno = 0;
    long long n = -1, m = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        auto [a, b] = detail::parse_int_pair(line, lineno);
        n = a;
        m = b;
        break;
    }
    if (n < 0 || m < 0) throw ParseError("load_edge_list: missing or invalid 'N M' header", std::max(lineno, 1LL));
    Graph g(static_cast<int>(n));
    long long seen = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        if (seen == m) throw ParseError("load_edge_list: more edge lines than the header declares", lineno);
        auto [u, v] = detail::parse_int_pair(line, lineno);
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw ParseError("load_edge_list: vertex index out of range", lineno);
        if (u == v) throw ParseError("load_edge_list: self-loop", lineno);
        g.add_edge(static_cast<int>(u), static_cast<int>(v));
        ++seen;
    }
    if (seen != m) throw ParseError("load_edge_list: fewer edge lines than the header declares", lineno);
    return g;
}

inline void save_edge_list(const Graph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("save_edge_list: cannot open '" + path + "' for writing");
    out << g.n_vertices() << ' ' << g.edge_count() << '\n';
    for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

// Pairs "v1 v2", one per line; blank lines ignored.
inline std::vector<std::pair<int, int>> load_pair_file(const std::string& path, int n_total) {
    std::ifstream in(path);
    if (!in) throw Error("load_pair_file: cannot open '" + path + "'");
    std::string line;
    long long lineno = 0;
    std::vector<std::pair<int, int>> pairs;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        auto [a, b] = detail::parse_int_pair(line, lineno);
        if (a < 0 || a >= n_total || b < 0 || b >= n_total)
            throw ParseError("vertex index out of range", lineno);
        pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
    return pairs;
}

inline SeedPartition load_seed_pairs(const std::string& path, int n_total) {
    std::ifstream in(path);
    if (!in) throw Error("load_seed_pairs: cannot open '" + path + "'");
    std::string line;
    long long lineno = 0;
    std::vector<std::pair<int, int>> pairs;
    std::set<int> firsts, seconds;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        auto [a, b] = detail::parse_int_pair(line, lineno);
        if (a < 0 || a >= n_total || b < 0 || b >= n_total)
            throw ParseError("seed vertex out of range", lineno);
        if (!firsts.insert(static_cast<int>(a)).second)
            throw ParseError("duplicate seed in first coordinate", lineno);
        if (!seconds.insert(static_cast<int>(b)).second)
            throw ParseError("duplicate seed in second coordinate", lineno);
        pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
    return SeedPartition(n_total, std::move(pairs));
}

// ---------------------------------------------------------------------------
// Threshold curve fit
// ---------------------------------------------------------------------------

// Least-squares fit of strength = d + c * sqrt(log(n) / n).
struct ThresholdFit {
    double p = 0.0;
    double d = 0.0;
    double c = 0.0;
    double residual_rms = 0.0;
    std::vector<std::pair<int, double>> points;  // (n, strength)
};

inline ThresholdFit fit_threshold_curve(double p, std::vector<std::pair<int, double>> points) {
    std::set<int> distinct;
    for (const auto& [n, y] : points) distinct.insert(n);
    if (distinct.size() < 3)
        throw ContractError("fit_threshold_curve: need at least 3 distinct n values");

    double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (const auto& [n, y] : points) {
        const double x = std::sqrt(std::log(static_cast<double>(n)) / n);
        s1 += 1.0;
        sx += x;
        sxx += x * x;
        sy += y;
        sxy += x * y;
    }
    const double det = s1 * sxx - sx * sx;
    ThresholdFit fit;
    fit.p = p;
    fit.d = (sxx * sy - sx * sxy) / det;
    fit.c = (s1 * sxy - sx * sy) / det;
    double ss = 0;
    for (const auto& [n, y] : points) {
        const double x = std::sqrt(std::log(static_cast<double>(n)) / n);
        const double r = y - (fit.d + fit.c * x);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / s1);
    fit.points = std::move(points);
    return fit;
}

// ---------------------------------------------------------------------------
// Experiment runners
// ---------------------------------------------------------------------------

namespace detail {

class TrialTimer {
public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

inline void sort_records(std::vector<ExperimentRecord>& records) {
    std::sort(records.begin(), records.end(), [](const ExperimentRecord& a, const ExperimentRecord& b) {
        return a.experiment_id != b.experiment_id ? a.experiment_id < b.experiment_id
                                                  : a.trial_index < b.trial_index;
    });
}

inline ExperimentRecord record_from_result(std::string id, long long trial, const CorrelatedPair& pair,
                                           const MatchResult& res, double mu_prime,
                                           std::string descriptor, double rho_e, std::uint64_t seed,
                                           double ms) {
    ExperimentRecord r;
    r.experiment_id = std::move(id);
    r.trial_index = trial;
    r.n = pair.partition.nonseed_count();
    r.s = pair.partition.seed_count();
    r.mu_prime = mu_prime;
    r.dist_descriptor = std::move(descriptor);
    r.rho_e = rho_e;
    r.rho_h_realized = heterogeneity_correlation(pair.params);
    r.rho_T = total_correlation(r.rho_h_realized, rho_e);
    r.match_ratio = match_ratio(res.matching, pair.truth);
    r.restricted_strength = res.restricted_strength;
    r.full_strength = res.full_strength;
    r.solver = res.solver == SolverKind::Exact ? "exact" : "sgm";
    r.iterations = res.iterations;
    r.rng_seed = seed;
    r.wall_time_ms = ms;
    return r;
}

}  // namespace detail

// Correlated Erdos-Renyi sweep solved to optimality (small instances).
inline std::vector<ExperimentRecord> run_hockey_exact(const std::vector<double>& rho_grid, int reps,
                                                      int n, int s, double p, const ExactConfig& ecfg,
                                                      Rng& rng, int jobs = 1) {
    if (rho_grid.empty()) throw ContractError("run_hockey_exact: empty rho grid");
    if (reps < 1) throw ContractError("run_hockey_exact: need at least one repetition");
    if (!(p > 0.0 && p < 1.0)) throw ContractError("run_hockey_exact: p must lie strictly inside (0,1)");

    const std::uint64_t root = rng();
    const long long total = static_cast<long long>(rho_grid.size()) * reps;
    std::vector<ExperimentRecord> records(total);
    parallel_for(total, jobs, [&](long long t) {
        const double rho = rho_grid[static_cast<std::size_t>(t / reps)];
        const std::uint64_t seed = derive_seed(root, static_cast<std::uint64_t>(t));
        Rng local = make_rng(seed);
        detail::TrialTimer timer;
        CorrelatedPairSpec spec;
        spec.n = n;
        spec.s = s;
        spec.edge_corr = rho;
        spec.source = ParamDistribution{PointMass{p}};
        CorrelatedPair pair = sample_correlated_pair(spec, local);
        MatchResult res = exact_match(pair.g1, pair.g2, pair.partition, ecfg);
        records[t] = detail::record_from_result("hockey-exact", t, pair, res, p,
                                                describe(PointMass{p}), rho, seed, timer.ms());
    });
    detail::sort_records(records);
    return records;
}

// Scaled-Beta parameter sweep matched with SGM; one realization per
// combination of (beta pair, seed count, rho_e, delta fraction). Delta values
// are given as fractions of delta_max for the pair, mirroring the grid
// "0 to delta_max in increments of delta_max/10".
inline std::vector<ExperimentRecord> run_hockey_sgm(
    const std::vector<std::pair<double, double>>& beta_pairs, double mu_prime,
    const std::vector<int>& s_values, const std::vector<double>& rho_grid,
    const std::vector<double>& delta_fracs, int n, const SgmConfig& cfg, Rng& rng, int jobs = 1) {
    if (beta_pairs.empty() || s_values.empty() || rho_grid.empty() || delta_fracs.empty())
        throw ContractError("run_hockey_sgm: empty grid");
    for (double f : delta_fracs)
        if (!(f >= 0.0 && f <= 1.0))
            throw SpecError("run_hockey_sgm: delta fraction outside [0,1] (delta above delta_max)");

    struct Combo {
        double alpha, beta, delta;
        int s;
        double rho;
    };
    std::vector<Combo> combos;
    for (const auto& [alpha, beta] : beta_pairs) {
        const double dmax = scaled_beta_delta_max(alpha, beta, mu_prime);
        for (int s : s_values)
            for (double rho : rho_grid)
                for (double f : delta_fracs) combos.push_back({alpha, beta, f * dmax, s, rho});
    }

    const std::uint64_t root = rng();
    std::vector<ExperimentRecord> records(combos.size());
    parallel_for(static_cast<long long>(combos.size()), jobs, [&](long long t) {
        const Combo& c = combos[static_cast<std::size_t>(t)];
        const std::uint64_t seed = derive_seed(root, static_cast<std::uint64_t>(t));
        Rng local = make_rng(seed);
        detail::TrialTimer timer;
        ScaledBeta dist{c.alpha, c.beta, c.delta, mu_prime};
        CorrelatedPairSpec spec;
        spec.n = n;
        spec.s = c.s;
        spec.edge_corr = c.rho;
        spec.source = ParamDistribution{dist};
        CorrelatedPair pair = sample_correlated_pair(spec, local);
        MatchResult res = sgm_match(pair.g1, pair.g2, pair.partition, cfg);
        records[t] = detail::record_from_result("hockey-sgm", t, pair, res, mu_prime, describe(dist),
                                                c.rho, seed, timer.ms());
    });
    detail::sort_records(records);
    return records;
}

struct ThresholdScanResult {
    std::vector<ExperimentRecord> records;
    std::vector<ThresholdFit> fits;  // one per p, in input order
};

// Phantom strength vs n for uncorrelated unseeded pairs, with the
// d + c*sqrt(log n / n) fit per density.
inline ThresholdScanResult run_threshold_scan(const std::vector<double>& p_values,
                                              const std::vector<int>& n_values, int reps,
                                              const SgmConfig& cfg, Rng& rng, int jobs = 1) {
    if (p_values.empty()) throw ContractError("run_threshold_scan: no p values");
    if (reps < 1) throw ContractError("run_threshold_scan: need at least one repetition");
    {
        std::set<int> distinct(n_values.begin(), n_values.end());
        if (distinct.size() < 3)
            throw ContractError("run_threshold_scan: need at least 3 distinct n values for the fit");
    }
    for (double p : p_values)
        if (!(p > 0.0 && p < 1.0)) throw ContractError("run_threshold_scan: p must lie in (0,1)");

    const std::uint64_t root = rng();
    const long long per_p = static_cast<long long>(n_values.size()) * reps;
    const long long total = static_cast<long long>(p_values.size()) * per_p;
    std::vector<ExperimentRecord> records(total);
    parallel_for(total, jobs, [&](long long t) {
        const double p = p_values[static_cast<std::size_t>(t / per_p)];
        const long long within = t % per_p;
        const int n = n_values[static_cast<std::size_t>(within / reps)];
        const std::uint64_t seed = derive_seed(root, static_cast<std::uint64_t>(t));
        Rng local = make_rng(seed);
        detail::TrialTimer timer;
        CorrelatedPairSpec spec;
        spec.n = n;
        spec.s = 0;
        spec.edge_corr = 0.0;
        spec.source = ParamDistribution{PointMass{p}};
        CorrelatedPair pair = sample_correlated_pair(spec, local);
        MatchResult res = sgm_match(pair.g1, pair.g2, pair.partition, cfg);
        records[t] = detail::record_from_result("threshold", t, pair, res, p, describe(PointMass{p}),
                                                0.0, seed, timer.ms());
    });

    ThresholdScanResult out;
    out.fits.reserve(p_values.size());
    for (std::size_t pi = 0; pi < p_values.size(); ++pi) {
        std::vector<std::pair<int, double>> points;
        points.reserve(per_p);
        for (long long t = static_cast<long long>(pi) * per_p; t < static_cast<long long>(pi + 1) * per_p; ++t)
            points.emplace_back(records[t].n, records[t].restricted_strength);
        out.fits.push_back(fit_threshold_curve(p_values[pi], std::move(points)));
    }
    out.records = std::move(records);
    detail::sort_records(out.records);
    return out;
}

struct BlockVariant {
    std::string label;
    BlockModelSpec spec;
};

// The three two-block settings: point masses at the entries of M ("A"), the
// same with the last diagonal distribution replaced by uniform [0,1] ("B"),
// and the eight combinations of narrow (mean +/- 0.05) or wide ([0, 2 mean])
// uniform intervals ("C0".."C7", bit k = wide interval for pair class k in
// the order F11, F12, F22).
inline std::vector<BlockVariant> standard_block_variants(const std::vector<double>& pi,
                                                         const std::vector<std::vector<double>>& m) {
    std::vector<BlockVariant> out;
    out.push_back({"A", BlockModelSpec::point_masses(pi, m)});
    if (pi.size() != 2) return out;

    const double m11 = m[0][0], m12 = m[0][1], m22 = m[1][1];
    if (std::abs(m22 - 0.5) < 1e-12) {
        std::vector<std::vector<ParamDistribution>> table = {
            {PointMass{m11}, PointMass{m12}},
            {PointMass{m12}, UniformInterval{0.0, 1.0}},
        };
        out.push_back({"B", BlockModelSpec(pi, std::move(table))});
    }
    const double entries[3] = {m11, m12, m22};
    bool c_ok = true;
    for (double e : entries)
        if (!(e >= 0.05 && e <= 0.5)) c_ok = false;
    if (c_ok) {
        for (int mask = 0; mask < 8; ++mask) {
            ParamDistribution f[3];
            for (int k = 0; k < 3; ++k) {
                if (mask & (1 << k))
                    f[k] = UniformInterval{0.0, 2.0 * entries[k]};
                else
                    f[k] = UniformInterval{entries[k] - 0.05, entries[k] + 0.05};
            }
            std::vector<std::vector<ParamDistribution>> table = {{f[0], f[1]}, {f[1], f[2]}};
            out.push_back({"C" + std::to_string(mask), BlockModelSpec(pi, std::move(table))});
        }
    }
    return out;
}

// Block-model sweep: one realization per (variant, rho_e).
inline std::vector<ExperimentRecord> run_block_experiment(int n, int s, const std::vector<BlockVariant>& variants,
                                                          const std::vector<double>& rho_grid,
                                                          const SgmConfig& cfg, Rng& rng, int jobs = 1) {
    if (variants.empty() || rho_grid.empty()) throw ContractError("run_block_experiment: empty grid");

    const std::uint64_t root = rng();
    const long long per_variant = static_cast<long long>(rho_grid.size());
    const long long total = static_cast<long long>(variants.size()) * per_variant;
    std::vector<ExperimentRecord> records(total);
    parallel_for(total, jobs, [&](long long t) {
        const BlockVariant& variant = variants[static_cast<std::size_t>(t / per_variant)];
        const double rho = rho_grid[static_cast<std::size_t>(t % per_variant)];
        const std::uint64_t seed = derive_seed(root, static_cast<std::uint64_t>(t));
        Rng local = make_rng(seed);
        detail::TrialTimer timer;
        CorrelatedPairSpec spec;
        spec.n = n;
        spec.s = s;
        spec.edge_corr = rho;
        spec.source = variant.spec;
        CorrelatedPair pair = sample_correlated_pair(spec, local);
        MatchResult res = sgm_match(pair.g1, pair.g2, pair.partition, cfg);
        records[t] = detail::record_from_result(
            "block-" + variant.label, t % per_variant, pair, res, variant.spec.expected_mean(),
            "block(label=" + variant.label + ";K=" + std::to_string(variant.spec.block_count()) + ")",
            rho, seed, timer.ms());
    });
    detail::sort_records(records);
    return records;
}

// Matching a fixed graph against rho-noised renditions of itself.
inline std::vector<ExperimentRecord> run_noisy_experiment(const Graph& g,
                                                          const std::vector<double>& rho_grid, int reps,
                                                          double seed_fraction, const SgmConfig& cfg,
                                                          Rng& rng, int jobs = 1) {
    if (rho_grid.empty()) throw ContractError("run_noisy_experiment: empty rho grid");
    if (reps < 1) throw ContractError("run_noisy_experiment: need at least one repetition");
    if (!(seed_fraction >= 0.0 && seed_fraction < 1.0))
        throw ContractError("run_noisy_experiment: seed fraction must lie in [0,1)");
    const int nt = g.n_vertices();
    const int s = static_cast<int>(std::ceil(seed_fraction * nt));
    if (nt - s < 2) throw ContractError("run_noisy_experiment: fewer than 2 nonseeds after seeding");
    const double density = full_density(g);

    const std::uint64_t root = rng();
    const long long total = static_cast<long long>(rho_grid.size()) * reps;
    std::vector<ExperimentRecord> records(total);
    parallel_for(total, jobs, [&](long long t) {
        const double rho = rho_grid[static_cast<std::size_t>(t / reps)];
        const std::uint64_t seed = derive_seed(root, static_cast<std::uint64_t>(t));
        Rng local = make_rng(seed);
        detail::TrialTimer timer;
        Graph noisy = noised_rendition(g, rho, local);
        std::vector<int> seed_vertices = sample_without_replacement(nt, s, local);
        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(seed_vertices.size());
        for (int v : seed_vertices) pairs.emplace_back(v, v);
        SeedPartition partition(nt, std::move(pairs));
        Matching truth = Matching::identity(partition);
        MatchResult res = sgm_match(g, noisy, partition, cfg);

        ExperimentRecord r;
        r.experiment_id = "noisy";
        r.trial_index = t;
        r.n = partition.nonseed_count();
        r.s = s;
        r.mu_prime = density;
        r.dist_descriptor = "noised(density=" + format_double(density) + ")";
        r.rho_e = rho;
        // A rendition mixes in density-matched independent noise, so the pair
        // is edge-correlated at rho with no heterogeneity contribution.
        r.rho_h_realized = 0.0;
        r.rho_T = total_correlation(0.0, rho);
        r.match_ratio = match_ratio(res.matching, truth);
        r.restricted_strength = res.restricted_strength;
        r.full_strength = res.full_strength;
        r.solver = "sgm";
        r.iterations = res.iterations;
        r.rng_seed = seed;
        r.wall_time_ms = timer.ms();
        records[t] = r;
    });
    detail::sort_records(records);
    return records;
}

}  // namespace gmatch
