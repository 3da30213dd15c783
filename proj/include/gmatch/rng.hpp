#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "gmatch/errors.hpp"

namespace gmatch {

// All sampling in the library goes through an explicit generator handle so
// experiments are reproducible from a single root seed.
using Rng = std::mt19937_64;

namespace detail {

// splitmix64 finalizer (Steele, Lea, Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

// Small counter-based engine used for per-pair parameter substreams.
// Cheap to construct, which matters when one engine is made per vertex pair.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }

    result_type operator()() { return detail::mix64(state_++); }

private:
    std::uint64_t state_;
};

inline Rng make_rng(std::uint64_t seed) { return Rng(detail::mix64(seed)); }

// Seed-splitting scheme: child k of a root seed is the splitmix64 hash of the
// root mixed with the child index. Parallel trials each get child(root, k) so
// results do not depend on scheduling.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    return detail::mix64(detail::mix64(root) ^ (index + 0x428a2f98d728ae22ULL));
}

// Uniform double in [0,1) from the top 53 bits, independent of any
// library-specific distribution implementation.
template <class Urbg>
double uniform01(Urbg& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

template <class Urbg>
bool bernoulli(Urbg& g, double p) {
    return uniform01(g) < p;
}

// Unbiased integer in [0, n) via bitmask rejection.
template <class Urbg>
std::uint64_t uniform_below(Urbg& g, std::uint64_t n) {
    if (n == 0) throw ContractError("uniform_below: n must be positive");
    if (n == 1) return 0;
    std::uint64_t mask = ~0ULL >> __builtin_clzll(n - 1);
    for (;;) {
        std::uint64_t x = g() & mask;
        if (x < n) return x;
    }
}

// First k entries of a uniform random permutation of {0..n-1}
// (partial Fisher-Yates), returned sorted ascending.
template <class Urbg>
std::vector<int> sample_without_replacement(int n, int k, Urbg& g) {
    if (k < 0 || k > n) throw ContractError("sample_without_replacement: need 0 <= k <= n");
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < k; ++i) {
        int j = i + static_cast<int>(uniform_below(g, static_cast<std::uint64_t>(n - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace gmatch
