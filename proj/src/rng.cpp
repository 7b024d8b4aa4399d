#include "hpr/rng.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace hpr {

std::vector<std::uint64_t> Rng::distinct(std::uint64_t universe, std::size_t count) {
    if (count > universe) throw std::invalid_argument("distinct: count exceeds universe");
    std::vector<std::uint64_t> out;
    out.reserve(count);
    if (count == 0) return out;
    if (universe <= (1ULL << 33)) {
        // Bitmap dedup; rejection stays cheap for count <= universe/2 and the
        // sorted result falls out of the final scan.
        const bool track_hits = count * 2 <= universe;
        const std::size_t want = track_hits ? count : static_cast<std::size_t>(universe - count);
        std::vector<std::uint64_t> bits((universe + 63) / 64, 0);
        std::size_t placed = 0;
        while (placed < want) {
            std::uint64_t r = below(universe);
            std::uint64_t& w = bits[r >> 6];
            std::uint64_t m = 1ULL << (r & 63);
            if (w & m) continue;
            w |= m;
            placed++;
        }
        for (std::uint64_t r = 0; r < universe; ++r) {
            bool hit = (bits[r >> 6] >> (r & 63)) & 1;
            if (hit == track_hits) out.push_back(r);
        }
        return out;
    }
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(count * 2);
    while (seen.size() < count) seen.insert(below(universe));
    out.assign(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    return out;
}

uint128 binom128(std::uint64_t n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = static_cast<unsigned>(n - k);
    uint128 r = 1;
    for (unsigned i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

std::uint64_t binomial_sample(Rng& rng, std::uint64_t trials, double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    if (trials <= 100000) {
        std::uint64_t c = 0;
        for (std::uint64_t i = 0; i < trials; ++i) c += rng.bernoulli(p) ? 1 : 0;
        return c;
    }
    // Normal approximation; fine at this scale and keeps the draw portable.
    double u1 = rng.uniform01(), u2 = rng.uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    double mean = static_cast<double>(trials) * p;
    double sd = std::sqrt(mean * (1.0 - p));
    double v = mean + sd * z;
    if (v < 0) v = 0;
    double cap = static_cast<double>(trials);
    if (v > cap) v = cap;
    return static_cast<std::uint64_t>(v + 0.5);
}

std::vector<std::uint32_t> unrank_kset(uint128 rank, std::uint32_t n, unsigned k) {
    // Colex: {c_1 < ... < c_k} has rank sum C(c_i, i).
    std::vector<std::uint32_t> out(k);
    for (unsigned i = k; i >= 1; --i) {
        std::uint32_t lo = i - 1, hi = n - 1, best = i - 1;
        while (lo <= hi) {
            std::uint32_t mid = lo + (hi - lo) / 2;
            if (binom128(mid, i) <= rank) {
                best = mid;
                lo = mid + 1;
            } else {
                if (mid == 0) break;
                hi = mid - 1;
            }
        }
        out[i - 1] = best;
        rank -= binom128(best, i);
        n = best;
    }
    return out;
}

uint128 rank_kset(const std::vector<std::uint32_t>& sorted_set) {
    uint128 r = 0;
    for (std::size_t i = 0; i < sorted_set.size(); ++i)
        r += binom128(sorted_set[i], static_cast<unsigned>(i + 1));
    return r;
}

}  // namespace hpr
