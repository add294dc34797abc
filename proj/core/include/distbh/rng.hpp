#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include "distbh/normal.hpp"

// Reproducible randomness. Trials must replay bit-identically across runs
// and platforms, so every mapping from raw engine output to a number is
// pinned here instead of going through std::*_distribution (whose algorithms
// are implementation-defined). mt19937_64 itself is fully specified by the
// standard. Normals use the inverse-CDF method (norm_ppf).

namespace distbh {

/// SplitMix64 finalizer. Bijective on u64, used for seed derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// One random stream. Cheap to create; make one per (trial, node) via
/// SeedPolicy rather than sharing streams across work units.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on (0,1), 53-bit resolution. The half-ulp offset keeps the
    /// endpoints unreachable so the result can always go through norm_ppf.
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via inverse CDF.
    double normal() { return norm_ppf(uniform01()); }

    /// Unbiased integer in [0, n), rejection sampled. n must be positive.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t rem = std::numeric_limits<std::uint64_t>::max() % n;
        if (rem == n - 1) return engine_() % n;  // n divides 2^64
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;
        for (;;) {
            const std::uint64_t v = engine_();
            if (v < limit) return v % n;
        }
    }

private:
    std::mt19937_64 engine_;
};

/// Derives one independent stream per (trial, node) pair. Each chaining step
/// XORs into a SplitMix64 pass; since the finalizer is a bijection, distinct
/// (trial, node) pairs are guaranteed distinct seeds.
struct SeedPolicy {
    std::uint64_t base_seed = 0;

    /// Sentinel trial index for run-level (trial-independent) draws.
    static constexpr std::uint64_t kConfigTrial = ~std::uint64_t{0};

    std::uint64_t stream_seed(std::uint64_t trial, std::uint64_t node) const {
        std::uint64_t h = splitmix64(base_seed);
        h = splitmix64(h ^ trial);
        h = splitmix64(h ^ node);
        return h;
    }

    RngStream stream(std::uint64_t trial, std::uint64_t node) const {
        return RngStream(stream_seed(trial, node));
    }
};

}  // namespace distbh
