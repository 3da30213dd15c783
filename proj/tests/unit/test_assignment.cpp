#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <chrono>
#include <numeric>
#include <vector>

#include "gmatch/assignment.hpp"
#include "gmatch/rng.hpp"

using namespace gmatch;

namespace {

double brute_force_min(const CostMatrix& c) {
    std::vector<int> perm(c.dim());
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double obj = 0.0;
        for (int i = 0; i < c.dim(); ++i) obj += c.at(i, perm[i]);
        best = std::min(best, obj);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

CostMatrix random_matrix(int n, Rng& rng, double scale = 10.0) {
    CostMatrix c(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c.at(i, j) = scale * uniform01(rng);
    return c;
}

}  // namespace

TEST_CASE("lap trivial instances") {
    CostMatrix c(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c.at(i, j) = i == j ? 0.0 : 1.0;
    Assignment a = solve_lap_min(c);
    REQUIRE(a.perm == std::vector<int>{0, 1, 2});
    REQUIRE(a.objective == 0.0);

    CostMatrix c2(2);
    c2.at(0, 0) = 1;
    c2.at(0, 1) = 2;
    c2.at(1, 0) = 3;
    c2.at(1, 1) = 0;
    Assignment a2 = solve_lap_min(c2);
    REQUIRE(a2.perm == std::vector<int>{0, 1});
    REQUIRE(a2.objective == 1.0);

    CostMatrix c1(1);
    c1.at(0, 0) = 4.5;
    REQUIRE(solve_lap_min(c1).objective == 4.5);
}

TEST_CASE("lap max variants") {
    CostMatrix constant(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) constant.at(i, j) = 2.5;
    REQUIRE(solve_lap_max(constant).objective == Catch::Approx(10.0));

    CostMatrix reward(5);
    for (int i = 0; i < 5; ++i) reward.at(i, i) = 1.0;
    Assignment a = solve_lap_max(reward);
    REQUIRE(a.perm == std::vector<int>{0, 1, 2, 3, 4});
    REQUIRE(a.objective == Catch::Approx(5.0));
}

TEST_CASE("lap equals brute force on random instances") {
    Rng rng = make_rng(42);
    for (int trial = 0; trial < 120; ++trial) {
        const int n = 2 + static_cast<int>(uniform_below(rng, 6));  // 2..7
        CostMatrix c = random_matrix(n, rng);
        Assignment a = solve_lap_min(c);

        // permutation validity and objective consistency
        std::vector<char> hit(n, 0);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            REQUIRE(a.perm[i] >= 0);
            REQUIRE(a.perm[i] < n);
            REQUIRE_FALSE(hit[a.perm[i]]);
            hit[a.perm[i]] = 1;
            sum += c.at(i, a.perm[i]);
        }
        REQUIRE(a.objective == Catch::Approx(sum).epsilon(1e-9));
        REQUIRE(a.objective == Catch::Approx(brute_force_min(c)).margin(1e-9));

        // max equals negated min of the negated matrix
        CostMatrix neg(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) neg.at(i, j) = -c.at(i, j);
        REQUIRE(solve_lap_max(neg).objective == Catch::Approx(-a.objective).margin(1e-9));
    }
}

TEST_CASE("lap row and column shift invariance") {
    Rng rng = make_rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + static_cast<int>(uniform_below(rng, 4));
        CostMatrix c = random_matrix(n, rng);
        Assignment base = solve_lap_min(c);

        const int row = static_cast<int>(uniform_below(rng, n));
        const double shift = 5.0 * uniform01(rng) - 2.5;
        CostMatrix shifted = c;
        for (int j = 0; j < n; ++j) shifted.at(row, j) += shift;
        Assignment after = solve_lap_min(shifted);
        REQUIRE(after.objective == Catch::Approx(base.objective + shift).margin(1e-9));

        const int col = static_cast<int>(uniform_below(rng, n));
        for (int i = 0; i < n; ++i) shifted.at(i, col) += shift;
        Assignment after2 = solve_lap_min(shifted);
        REQUIRE(after2.objective == Catch::Approx(base.objective + 2 * shift).margin(1e-9));
    }
}

TEST_CASE("lap determinism") {
    Rng rng = make_rng(13);
    CostMatrix c = random_matrix(6, rng);
    // force ties
    c.at(0, 1) = c.at(0, 2) = c.at(1, 1) = c.at(1, 2);
    Assignment a = solve_lap_min(c);
    Assignment b = solve_lap_min(c);
    REQUIRE(a.perm == b.perm);

    CostMatrix zeros(5);
    REQUIRE(solve_lap_min(zeros).perm == solve_lap_min(zeros).perm);
}

TEST_CASE("lap rejects bad input") {
    CostMatrix c(2);
    c.at(1, 1) = std::numeric_limits<double>::infinity();
    REQUIRE_THROWS_AS(solve_lap_min(c), ContractError);
    REQUIRE_THROWS_AS(CostMatrix(0), ContractError);
}

TEST_CASE("lap large instance finishes quickly") {
    Rng rng = make_rng(99);
    const int n = 2000;
    std::vector<double> cost(static_cast<std::size_t>(n) * n);
    for (auto& x : cost) x = uniform01(rng);
    const auto t0 = std::chrono::steady_clock::now();
    Assignment a = detail::lap_min_rowmajor(cost.data(), n);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    REQUIRE(secs < 10.0);
    std::vector<char> hit(n, 0);
    for (int i = 0; i < n; ++i) {
        REQUIRE_FALSE(hit[a.perm[i]]);
        hit[a.perm[i]] = 1;
    }
}
