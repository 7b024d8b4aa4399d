#pragma once

#include <cstdint>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace hpr {

// SplitMix64. All randomness in the library flows through this generator so
// that every artifact is reproducible per (seed, stream) across platforms.
// Streams are split by mixing the stream id into the seed with one extra
// scramble round; parallel consumers each take their own stream id.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
        return Rng(mix(seed ^ mix(stream_id * 0xda942042e4dd58b5ULL + 1)));
    }

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound) by rejection, bias-free.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x;
        do { x = next(); } while (x >= limit);
        return x % bound;
    }

    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Draw `count` distinct values from [0, universe); count <= universe.
    std::vector<std::uint64_t> distinct(std::uint64_t universe, std::size_t count);

private:
    std::uint64_t state_;
};

// 128-bit binomial coefficients, enough for C(n, k) with n <= ~2000, k <= 8.
using uint128 = unsigned __int128;

uint128 binom128(std::uint64_t n, unsigned k);

// Binomial(trials, p) sample: exact Bernoulli summation for small `trials`,
// normal approximation (clamped) beyond. Deterministic per rng state.
std::uint64_t binomial_sample(Rng& rng, std::uint64_t trials, double p);

// Colex combinadic: bijection between [0, C(n,k)) and k-subsets of [0, n),
// decoded coordinate-wise by binary search.
std::vector<std::uint32_t> unrank_kset(uint128 rank, std::uint32_t n, unsigned k);
uint128 rank_kset(const std::vector<std::uint32_t>& sorted_set);

}  // namespace hpr
