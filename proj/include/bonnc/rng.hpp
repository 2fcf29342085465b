#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace bonnc {

/// Mixes a base seed with a stream id (splitmix64 finalizer) so independent
/// consumers get decorrelated, reproducible streams.
inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
    uint64_t z = base + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Seeded random source. The distribution transforms are pinned here instead
/// of delegating to std:: distributions, whose algorithms differ between
/// standard libraries; reports must be bit-identical for a given seed.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n); unbiased via rejection.
    int uniform_int(int n) {
        const uint64_t un = static_cast<uint64_t>(n);
        const uint64_t bound = UINT64_MAX - UINT64_MAX % un;
        uint64_t x = next_u64();
        while (x >= bound) x = next_u64();
        return static_cast<int>(x % un);
    }

    /// Standard normal via Box-Muller. Uncached: every call consumes exactly
    /// two uniforms, which keeps draw positions independent of call history.
    double normal() {
        constexpr double two_pi = 6.283185307179586476925287;
        const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (int i = static_cast<int>(v.size()) - 1; i > 0; --i)
            std::swap(v[static_cast<size_t>(i)], v[static_cast<size_t>(uniform_int(i + 1))]);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace bonnc
