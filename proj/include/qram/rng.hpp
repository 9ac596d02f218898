#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace qram {

inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// xoshiro256++ with splitmix64 seeding. Hand-rolled so that seeded runs are
// byte-stable across standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed = 0) {
        uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    // Independent stream for trajectory `index` under a master seed. Both
    // simulator backends derive per-trajectory streams this way, so matched
    // (seed, index) pairs see matched streams.
    static Rng substream(uint64_t seed, uint64_t index) {
        uint64_t s = seed;
        uint64_t a = splitmix64(s);
        s = a ^ (0x9e3779b97f4a7c15ull * (index + 1));
        return Rng(splitmix64(s));
    }

    uint64_t next() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, bound)
    uint64_t uniform_int(uint64_t bound) {
        // rejection-free modulo is fine here; bounds are tiny vs 2^64
        return next() % bound;
    }

    // Gap (>= 1) to the next success of a Bernoulli(rate) trial sequence.
    // Scanning a long grid with these skips reproduces independent
    // per-element events in O(#events) draws.
    int64_t geometric_skip(double rate) {
        if (rate <= 0.0) return std::numeric_limits<int64_t>::max() / 4;
        if (rate >= 1.0) return 1;
        double u = uniform();
        // log1p(-u) is never -inf since u < 1
        double g = std::floor(std::log1p(-u) / std::log1p(-rate));
        if (g < 0) g = 0;
        return 1 + static_cast<int64_t>(g);
    }

private:
    static uint64_t rotl(uint64_t x, int s) { return (x << s) | (x >> (64 - s)); }
    uint64_t state_[4];
};

}  // namespace qram
