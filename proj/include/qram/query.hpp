#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qram/rng.hpp"
#include "qram/topology.hpp"

namespace qram {

using cplx = std::complex<double>;

// Classical storage: 2^(m+n) cells of k bits. Cell index = high * 2^n + low,
// where `low` is the tree address (integer, see address_bit).
struct MemoryTable {
    int n = 1;
    int m = 0;
    int k = 1;
    std::vector<uint64_t> words;

    static MemoryTable zeros(const TreeSpec& spec, int m = 0);
    static MemoryTable random(const TreeSpec& spec, int m, Rng& rng);

    uint64_t cells() const { return uint64_t{1} << (m + n); }
    uint64_t word(uint64_t high, uint64_t low) const { return words[(high << n) | low]; }
    int bit(uint64_t high, uint64_t low, int digit) const {
        return static_cast<int>((word(high, low) >> digit) & 1u);
    }
};

// One computational-basis component of the bus input.
struct InputBranch {
    uint64_t high = 0;     // high-address register value (hybrid tasks)
    uint64_t address = 0;  // tree address
    uint64_t word = 0;     // data-bus word z
    std::complex<double> amp{1.0, 0.0};
};

struct QueryInput {
    std::vector<InputBranch> branches;

    // Uniform superposition over all 2^(m+n) addresses with z = 0: the
    // default experiment input.
    static QueryInput uniform_addresses(const TreeSpec& spec, int m = 0);
    // Seeded random complex amplitudes over the full (high, address, word) basis.
    static QueryInput random_superposition(const TreeSpec& spec, int m, Rng& rng);

    void normalize();
    double norm2() const;
};

struct FidelityEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    double lambda_mean = 0.0;
    int trajectories = 0;
};

}  // namespace qram
