// Command-line frontend: pair generation, matching, phantom calibration, the
// truth decision rule, and the experiment drivers with CSV output.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "gmatch/gmatch.hpp"

using namespace gmatch;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

double to_double(const std::string& s) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ContractError("expected a real number, got '" + s + "'");
    }
}

int to_int(const std::string& s) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ContractError("expected an integer, got '" + s + "'");
    }
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& tok : split(s, ',')) out.push_back(to_double(tok));
    return out;
}

std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    for (const auto& tok : split(s, ',')) out.push_back(to_int(tok));
    return out;
}

// Either "start:stop:step" (inclusive) or a comma list "a,b,c".
std::vector<double> parse_grid(const std::string& s) {
    if (s.find(':') == std::string::npos) return parse_doubles(s);
    auto parts = split(s, ':');
    if (parts.size() != 3) throw ContractError("grid must be 'start:stop:step' or a comma list");
    const double start = to_double(parts[0]), stop = to_double(parts[1]), step = to_double(parts[2]);
    if (!(step > 0.0)) throw ContractError("grid step must be positive");
    std::vector<double> out;
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) out.push_back(start + i * step);
    return out;
}

// "pointmass:P" | "uniform:LO:HI" | "beta:ALPHA:BETA:DELTA:MU"
ParamDistribution parse_dist(const std::string& s) {
    auto parts = split(s, ':');
    if (parts[0] == "pointmass" && parts.size() == 2) return PointMass{to_double(parts[1])};
    if (parts[0] == "uniform" && parts.size() == 3)
        return UniformInterval{to_double(parts[1]), to_double(parts[2])};
    if (parts[0] == "beta" && parts.size() == 5)
        return ScaledBeta{to_double(parts[1]), to_double(parts[2]), to_double(parts[3]),
                          to_double(parts[4])};
    throw ContractError("cannot parse distribution '" + s +
                        "' (expected pointmass:P, uniform:LO:HI, or beta:A:B:DELTA:MU)");
}

// Rows separated by ';', entries by ','.
std::vector<std::vector<double>> parse_matrix(const std::string& s) {
    std::vector<std::vector<double>> rows;
    for (const auto& row : split(s, ';')) rows.push_back(parse_doubles(row));
    return rows;
}

std::vector<std::pair<double, double>> parse_beta_pairs(const std::string& s) {
    std::vector<std::pair<double, double>> out;
    for (const auto& tok : split(s, ',')) {
        auto ab = split(tok, ':');
        if (ab.size() != 2) throw ContractError("beta pairs must look like '1:1,2:5'");
        out.emplace_back(to_double(ab[0]), to_double(ab[1]));
    }
    return out;
}

struct SgmFlags {
    int max_iterations = 30;
    double tol = 0.05;
    int restarts = 0;
    std::string init = "barycenter";

    void attach(CLI::App* cmd) {
        cmd->add_option("--max-iterations", max_iterations, "Frank-Wolfe iteration cap");
        cmd->add_option("--tol", tol, "convergence tolerance (scaled by sqrt(n))");
        cmd->add_option("--restarts", restarts, "extra random doubly stochastic restarts");
        cmd->add_option("--init", init, "barycenter | identity | random");
    }

    SgmConfig config() const {
        SgmConfig cfg;
        cfg.max_iterations = max_iterations;
        cfg.convergence_tol = tol;
        cfg.restarts = restarts;
        if (init == "barycenter")
            cfg.initialization = SgmInit::Barycenter;
        else if (init == "identity")
            cfg.initialization = SgmInit::Identity;
        else if (init == "random")
            cfg.initialization = SgmInit::RandomDoublyStochastic;
        else
            throw ContractError("unknown initialization '" + init + "'");
        return cfg;
    }
};

void write_pairs(const std::string& path, const std::vector<std::pair<int, int>>& pairs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    for (auto [a, b] : pairs) out << a << ' ' << b << '\n';
}

int run_generate(int n, int s, double rho, const std::string& dist, const std::string& block_pi,
                 const std::string& block_m, std::uint64_t seed, const std::string& out1,
                 const std::string& out2, const std::string& seeds_out, const std::string& truth_out) {
    CorrelatedPairSpec spec;
    spec.n = n;
    spec.s = s;
    spec.edge_corr = rho;
    if (!block_pi.empty() || !block_m.empty()) {
        if (block_pi.empty() || block_m.empty())
            throw ContractError("block generation needs both --block-pi and --block-m");
        spec.source = BlockModelSpec::point_masses(parse_doubles(block_pi), parse_matrix(block_m));
    } else {
        spec.source = parse_dist(dist);
    }
    Rng rng = make_rng(seed);
    CorrelatedPair pair = sample_correlated_pair(spec, rng);
    save_edge_list(pair.g1, out1);
    save_edge_list(pair.g2, out2);
    if (!seeds_out.empty()) write_pairs(seeds_out, pair.partition.seed_pairs());
    if (!truth_out.empty()) {
        std::vector<std::pair<int, int>> identity;
        for (int v = 0; v < pair.partition.n_total(); ++v) identity.emplace_back(v, v);
        write_pairs(truth_out, identity);
    }
    std::cout << "g1: " << out1 << " (" << pair.g1.n_vertices() << " vertices, "
              << pair.g1.edge_count() << " edges)\n";
    std::cout << "g2: " << out2 << " (" << pair.g2.n_vertices() << " vertices, "
              << pair.g2.edge_count() << " edges)\n";
    std::cout << "rho_h_realized: " << format_double(heterogeneity_correlation(pair.params)) << "\n";
    return 0;
}

int run_match(const std::string& g1_path, const std::string& g2_path, const std::string& seeds_path,
              const std::string& truth_path, const std::string& method, const SgmFlags& flags,
              int exact_limit, const std::string& out) {
    Graph g1 = load_edge_list(g1_path);
    Graph g2 = load_edge_list(g2_path);
    if (g1.n_vertices() != g2.n_vertices())
        throw ContractError("graphs have different vertex counts (" +
                            std::to_string(g1.n_vertices()) + " vs " +
                            std::to_string(g2.n_vertices()) + ")");
    SeedPartition partition = seeds_path.empty() ? SeedPartition::no_seeds(g1.n_vertices())
                                                 : load_seed_pairs(seeds_path, g1.n_vertices());

    MatchResult res = [&] {
        if (method == "exact") {
            ExactConfig cfg;
            cfg.max_nonseeds = exact_limit;
            return exact_match(g1, g2, partition, cfg);
        }
        if (method == "sgm") return sgm_match(g1, g2, partition, flags.config());
        throw ContractError("unknown method '" + method + "' (use sgm or exact)");
    }();

    std::cout << "method: " << method << "\n";
    std::cout << "n_total: " << partition.n_total() << "\nseeds: " << partition.seed_count()
              << "\nnonseeds: " << partition.nonseed_count() << "\n";
    std::cout << "full_disagreements: " << res.full_disagreements << "\n";
    std::cout << "restricted_disagreements: " << res.restricted_disagreements << "\n";
    std::cout << "full_strength: " << format_double(res.full_strength) << "\n";
    std::cout << "restricted_strength: " << format_double(res.restricted_strength) << "\n";
    std::cout << "iterations: " << res.iterations << "\n";
    std::cout << "proven_optimal: " << (res.proven_optimal ? "true" : "false") << "\n";

    if (!truth_path.empty()) {
        auto pairs = load_pair_file(truth_path, g1.n_vertices());
        std::vector<int> image(g1.n_vertices(), -1);
        for (auto [a, b] : pairs) {
            if (image[a] >= 0 && image[a] != b)
                throw ContractError("truth file maps vertex " + std::to_string(a) + " twice");
            image[a] = b;
        }
        const auto& ns2 = partition.nonseeds2();
        std::vector<int> pos(g1.n_vertices(), -1);
        for (std::size_t j = 0; j < ns2.size(); ++j) pos[ns2[j]] = static_cast<int>(j);
        std::vector<int> assign(partition.nonseed_count());
        const auto& ns1 = partition.nonseeds1();
        for (std::size_t i = 0; i < ns1.size(); ++i) {
            const int img = image[ns1[i]];
            if (img < 0)
                throw ContractError("truth file does not cover nonseed vertex " +
                                    std::to_string(ns1[i]));
            if (pos[img] < 0)
                throw ContractError("truth maps nonseed " + std::to_string(ns1[i]) +
                                    " to a seed vertex of g2");
            assign[i] = pos[img];
        }
        Matching truth(partition, assign);
        std::cout << "match_ratio: " << format_double(match_ratio(res.matching, truth)) << "\n";
    }

    if (!out.empty()) {
        std::vector<std::pair<int, int>> mapping;
        const auto phi = res.matching.vertex_map();
        for (int v = 0; v < g1.n_vertices(); ++v) mapping.emplace_back(v, phi[v]);
        write_pairs(out, mapping);
        std::cout << "matching written to " << out << "\n";
    }
    return 0;
}

int run_calibrate(int n, int s, double p, double p1, double p2, const std::string& block_pi,
                  const std::string& block_m, int replicates, std::uint64_t seed,
                  const SgmFlags& flags, int jobs) {
    Rng rng = make_rng(seed);
    PhantomEstimate est;
    if (!block_pi.empty() || !block_m.empty()) {
        if (block_pi.empty() || block_m.empty())
            throw ContractError("block calibration needs both --block-pi and --block-m");
        est = calibrate_phantom_block(n, s, parse_doubles(block_pi), parse_matrix(block_m),
                                      replicates, flags.config(), rng, jobs);
    } else if (p1 >= 0.0 || p2 >= 0.0) {
        if (p1 < 0.0 || p2 < 0.0) throw ContractError("per-graph mode needs both --p1 and --p2");
        est = calibrate_phantom(n, s, DensityMode::PerGraph, p1, p2, replicates, flags.config(),
                                rng, jobs);
    } else {
        est = calibrate_phantom(n, s, p, replicates, flags.config(), rng, jobs);
    }
    std::cout << "q_hat: " << format_double(est.q_hat) << "\n";
    std::cout << "replicates: " << est.replicates << "\n";
    for (int r = 0; r < est.replicates; ++r)
        std::cout << "sample " << r << ": " << format_double(est.per_replicate_strengths[r]) << "\n";
    return 0;
}

int run_decide(double strength, double q_hat, double epsilon) {
    TruthDecision d = decide_truthful(strength, q_hat, epsilon);
    std::cout << "observed_strength: " << format_double(d.observed_strength) << "\n";
    std::cout << "q_hat: " << format_double(d.q_hat) << "\n";
    std::cout << "epsilon: " << format_double(d.epsilon) << "\n";
    std::cout << "verdict: " << to_string(d.verdict) << "\n";
    return 0;
}

void report_written(const std::vector<ExperimentRecord>& records, const std::string& out) {
    std::cout << records.size() << " records -> " << out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"seeded graph matching, alignment strength, and phantom calibration"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "sample a correlated graph pair to edge-list files");
    int gen_n = 100, gen_s = 0;
    double gen_rho = 0.0;
    std::string gen_dist = "pointmass:0.5", gen_pi, gen_m;
    std::string gen_out1, gen_out2, gen_seeds, gen_truth;
    std::uint64_t gen_seed = 1;
    gen->add_option("--n", gen_n, "nonseed vertex count")->required();
    gen->add_option("--s", gen_s, "seed count");
    gen->add_option("--rho-e", gen_rho, "edge correlation in [0,1]");
    gen->add_option("--dist", gen_dist, "pointmass:P | uniform:LO:HI | beta:A:B:DELTA:MU");
    gen->add_option("--block-pi", gen_pi, "block probabilities, e.g. 0.2,0.8");
    gen->add_option("--block-m", gen_m, "block mean matrix, e.g. 0.3,0.4;0.4,0.5");
    gen->add_option("--seed", gen_seed, "root RNG seed");
    gen->add_option("--out1", gen_out1, "output edge list for g1")->required();
    gen->add_option("--out2", gen_out2, "output edge list for g2")->required();
    gen->add_option("--seeds-out", gen_seeds, "output seed-pair file");
    gen->add_option("--truth-out", gen_truth, "output true-correspondence file");

    // match
    auto* match = app.add_subcommand("match", "seeded-graph-match two edge-list files");
    std::string m_g1, m_g2, m_seeds, m_truth, m_method = "sgm", m_out;
    int m_exact_limit = 14;
    SgmFlags m_flags;
    match->add_option("--g1", m_g1, "edge list of the first graph")->required();
    match->add_option("--g2", m_g2, "edge list of the second graph")->required();
    match->add_option("--seeds", m_seeds, "seed-pair file (v1 v2 per line)");
    match->add_option("--truth", m_truth, "true-correspondence file, enables match ratio");
    match->add_option("--method", m_method, "sgm | exact");
    match->add_option("--exact-limit", m_exact_limit, "nonseed cap for the exact matcher");
    match->add_option("--out", m_out, "write the computed matching as pairs");
    m_flags.attach(match);

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "estimate the phantom alignment strength q_hat");
    int c_n = 0, c_s = 0, c_reps = 10, c_jobs = default_jobs();
    double c_p = 0.5, c_p1 = -1.0, c_p2 = -1.0;
    std::string c_pi, c_m;
    std::uint64_t c_seed = 1;
    SgmFlags c_flags;
    cal->add_option("--n", c_n, "nonseed count")->required();
    cal->add_option("--s", c_s, "seed count");
    cal->add_option("--p", c_p, "combined density");
    cal->add_option("--p1", c_p1, "density of the first graph (per-graph mode)");
    cal->add_option("--p2", c_p2, "density of the second graph (per-graph mode)");
    cal->add_option("--block-pi", c_pi, "block probabilities for block calibration");
    cal->add_option("--block-m", c_m, "block mean matrix for block calibration");
    cal->add_option("--replicates", c_reps, "number of independent replicates");
    cal->add_option("--seed", c_seed, "root RNG seed");
    cal->add_option("--jobs", c_jobs, "worker threads (default: GMATCH_JOBS or hardware)");
    c_flags.attach(cal);

    // decide
    auto* dec = app.add_subcommand("decide", "apply the phantom threshold rule");
    double d_strength = 0.0, d_qhat = 0.0, d_eps = 0.03;
    dec->add_option("--strength", d_strength, "observed restricted alignment strength")->required();
    dec->add_option("--qhat", d_qhat, "phantom alignment strength estimate")->required();
    dec->add_option("--epsilon", d_eps, "decision margin (must be positive)");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a sweep and emit CSV records");
    exp->require_subcommand(1);
    std::string e_out = "records.csv";
    std::uint64_t e_seed = 1;
    int e_jobs = default_jobs();
    bool e_zero_timing = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", e_out, "output CSV path");
        cmd->add_option("--seed", e_seed, "root RNG seed");
        cmd->add_option("--jobs", e_jobs, "worker threads (default: GMATCH_JOBS or hardware)");
        cmd->add_flag("--zero-timing", e_zero_timing,
                      "write wall_time_ms as 0 for byte-reproducible output");
    };

    auto* hex = exp->add_subcommand("hockey-exact", "correlated ER sweep with the exact matcher");
    int hex_n = 15, hex_s = 15, hex_reps = 10, hex_limit = 15;
    double hex_p = 0.5;
    std::string hex_grid = "0:1:0.1";
    hex->add_option("--n", hex_n, "nonseeds");
    hex->add_option("--s", hex_s, "seeds");
    hex->add_option("--p", hex_p, "Bernoulli parameter");
    hex->add_option("--rho-grid", hex_grid, "edge correlation grid (start:stop:step or list)");
    hex->add_option("--reps", hex_reps, "repetitions per grid point");
    hex->add_option("--exact-limit", hex_limit, "nonseed cap for the exact matcher");
    add_common(hex);

    auto* hsgm = exp->add_subcommand("hockey-sgm", "scaled-Beta parameter sweep with SGM");
    int hsgm_n = 500;
    double hsgm_mu = 0.5;
    std::string hsgm_s = "50", hsgm_grid = "0:1:0.1", hsgm_fracs = "0,0.5,1",
                hsgm_pairs = "1:1,0.5:0.5,2:2,5:1,2:5";
    SgmFlags hsgm_flags;
    hsgm->add_option("--n", hsgm_n, "nonseeds");
    hsgm->add_option("--mu-prime", hsgm_mu, "mean of the scaled Beta distribution");
    hsgm->add_option("--s-list", hsgm_s, "seed counts, comma separated");
    hsgm->add_option("--beta-pairs", hsgm_pairs, "alpha:beta pairs, comma separated");
    hsgm->add_option("--rho-grid", hsgm_grid, "edge correlation grid");
    hsgm->add_option("--delta-fracs", hsgm_fracs, "support lengths as fractions of delta_max");
    hsgm_flags.attach(hsgm);
    add_common(hsgm);

    auto* thr = exp->add_subcommand("threshold", "phantom strength vs n with curve fit");
    std::string thr_p = "0.5,0.05", thr_n = "500,750,1000,1500,2000";
    int thr_reps = 3;
    SgmFlags thr_flags;
    thr->add_option("--p-list", thr_p, "densities, comma separated");
    thr->add_option("--n-list", thr_n, "nonseed counts, comma separated");
    thr->add_option("--reps", thr_reps, "repetitions per (p, n)");
    thr_flags.attach(thr);
    add_common(thr);

    auto* blk = exp->add_subcommand("block", "two-block Bernoulli sweeps");
    int blk_n = 1000, blk_s = 40;
    std::string blk_pi = "0.2,0.8", blk_m = "0.3,0.4;0.4,0.5", blk_variants = "A",
                blk_grid = "0:1:0.1";
    SgmFlags blk_flags;
    blk->add_option("--n", blk_n, "nonseeds");
    blk->add_option("--s", blk_s, "seeds");
    blk->add_option("--pi", blk_pi, "block probabilities");
    blk->add_option("--m", blk_m, "block mean matrix (rows ';'-separated)");
    blk->add_option("--variants", blk_variants, "labels among A,B,C or C0..C7 (C expands to all)");
    blk->add_option("--rho-grid", blk_grid, "edge correlation grid");
    blk_flags.attach(blk);
    add_common(blk);

    auto* noisy = exp->add_subcommand("noisy", "match a graph against noised renditions of itself");
    std::string noisy_graph, noisy_grid = "0:1:0.1";
    int noisy_reps = 3;
    double noisy_frac = 0.1;
    SgmFlags noisy_flags;
    noisy->add_option("--graph", noisy_graph, "edge-list file of the base graph")->required();
    noisy->add_option("--rho-grid", noisy_grid, "noise parameter grid");
    noisy->add_option("--reps", noisy_reps, "repetitions per grid point");
    noisy->add_option("--seed-fraction", noisy_frac, "fraction of vertices used as seeds");
    noisy_flags.attach(noisy);
    add_common(noisy);

    try {
        app.parse(argc, argv);

        if (gen->parsed())
            return run_generate(gen_n, gen_s, gen_rho, gen_dist, gen_pi, gen_m, gen_seed, gen_out1,
                                gen_out2, gen_seeds, gen_truth);
        if (match->parsed())
            return run_match(m_g1, m_g2, m_seeds, m_truth, m_method, m_flags, m_exact_limit, m_out);
        if (cal->parsed())
            return run_calibrate(c_n, c_s, c_p, c_p1, c_p2, c_pi, c_m, c_reps, c_seed, c_flags,
                                 c_jobs);
        if (dec->parsed()) return run_decide(d_strength, d_qhat, d_eps);

        if (hex->parsed()) {
            Rng rng = make_rng(e_seed);
            ExactConfig cfg;
            cfg.max_nonseeds = hex_limit;
            auto records =
                run_hockey_exact(parse_grid(hex_grid), hex_reps, hex_n, hex_s, hex_p, cfg, rng, e_jobs);
            emit_csv(records, e_out, e_zero_timing);
            report_written(records, e_out);
            return 0;
        }
        if (hsgm->parsed()) {
            Rng rng = make_rng(e_seed);
            auto records = run_hockey_sgm(parse_beta_pairs(hsgm_pairs), hsgm_mu, parse_ints(hsgm_s),
                                          parse_grid(hsgm_grid), parse_doubles(hsgm_fracs), hsgm_n,
                                          hsgm_flags.config(), rng, e_jobs);
            emit_csv(records, e_out, e_zero_timing);
            report_written(records, e_out);
            return 0;
        }
        if (thr->parsed()) {
            Rng rng = make_rng(e_seed);
            auto result = run_threshold_scan(parse_doubles(thr_p), parse_ints(thr_n), thr_reps,
                                             thr_flags.config(), rng, e_jobs);
            emit_csv(result.records, e_out, e_zero_timing);
            for (const auto& fit : result.fits)
                std::cout << "p=" << format_double(fit.p) << ": c=" << format_double(fit.c)
                          << " d=" << format_double(fit.d)
                          << " rms=" << format_double(fit.residual_rms) << "\n";
            report_written(result.records, e_out);
            return 0;
        }
        if (blk->parsed()) {
            Rng rng = make_rng(e_seed);
            auto all = standard_block_variants(parse_doubles(blk_pi), parse_matrix(blk_m));
            std::vector<BlockVariant> chosen;
            for (const auto& want : split(blk_variants, ',')) {
                bool found = false;
                for (const auto& v : all) {
                    if (v.label == want || (want == "C" && v.label.size() == 2 && v.label[0] == 'C')) {
                        chosen.push_back(v);
                        found = true;
                    }
                }
                if (!found) throw ContractError("unknown block variant '" + want + "'");
            }
            auto records = run_block_experiment(blk_n, blk_s, chosen, parse_grid(blk_grid),
                                                blk_flags.config(), rng, e_jobs);
            emit_csv(records, e_out, e_zero_timing);
            report_written(records, e_out);
            return 0;
        }
        if (noisy->parsed()) {
            Rng rng = make_rng(e_seed);
            Graph g = load_edge_list(noisy_graph);
            auto records = run_noisy_experiment(g, parse_grid(noisy_grid), noisy_reps, noisy_frac,
                                                noisy_flags.config(), rng, e_jobs);
            emit_csv(records, e_out, e_zero_timing);
            report_written(records, e_out);
            return 0;
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
