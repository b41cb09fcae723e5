#pragma once

#include <cstdint>

namespace kepler {

/// splitmix64: tiny deterministic generator used wherever reproducible
/// draws are needed (search sampling, property tests). Identical output on
/// every platform for a fixed seed, unlike distribution adapters.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform01() {
        return double(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi].
    double uniform(double lo, double hi) {
        double v = lo + uniform01() * (hi - lo);
        return v < lo ? lo : (v > hi ? hi : v);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next() % n; }
};

} // namespace kepler
