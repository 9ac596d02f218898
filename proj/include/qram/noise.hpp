#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qram/program.hpp"
#include "qram/query.hpp"
#include "qram/rng.hpp"
#include "qram/topology.hpp"

namespace qram {

// Per-qudit per-tick channel rates. Noise acts on tree qudits only; bus and
// high-register wires are noiseless.
struct NoiseModel {
    double gamma = 0.0;  // amplitude damping rate
    double p = 0.0;      // depolarizing probability

    void check() const;
    bool silent() const { return gamma <= 0.0 && p <= 0.0; }
};

enum class ChannelKind { Damping, Depolarizing };

// One sampled non-identity Kraus/Weyl outcome. `index` identifies the
// operator: damping jumps are 1..dim-1 (level `index` decays to ground);
// depolarizing Weyls encode X^a Z^b as index = a*dim + b in [1, dim^2).
struct KrausOutcome {
    ChannelKind channel = ChannelKind::Depolarizing;
    int index = 0;
    int target = 0;  // layout qudit index
    int tick = 0;
};

// Small dense complex matrix, used for channel definitions and test oracles.
struct Cmat {
    int dim = 0;
    std::vector<std::complex<double>> a;  // row-major dim x dim

    static Cmat zero(int d) { return {d, std::vector<std::complex<double>>(d * d)}; }
    static Cmat identity(int d);
    std::complex<double>& at(int r, int c) { return a[r * dim + c]; }
    std::complex<double> at(int r, int c) const { return a[r * dim + c]; }
    Cmat dagger() const;
    Cmat mul(const Cmat& o) const;
};

// Amplitude damping Kraus set. Qubit: {K0, |0><1|*sqrt(g)}. Qutrit: ground
// level is W; L and R decay to W independently at rate g, giving
// {K0 = diag(1, s, s), sqrt(g)|W><L|, sqrt(g)|W><R|}, s = sqrt(1-g).
std::vector<Cmat> damping_kraus(int dim, double gamma);

// Generalized Pauli X^a Z^b, X the cyclic shift and Z|j> = w^j |j>,
// w = exp(2*pi*i/dim).
Cmat weyl_matrix(int dim, int a, int b);

struct WeylProb {
    int a = 0, b = 0;
    double prob = 0.0;
};
// The d^2-1 non-identity Weyl outcomes, each with probability p/(d^2-1).
// Identity carries the remaining 1-p.
std::vector<WeylProb> depolarizing_unraveling(int dim, double p);

// First-order event sampling over every (tree qudit, tick) pair: each
// damping jump operator fires independently with probability gamma and a
// depolarizing event with probability p (Weyl index uniform over the
// d^2-1 non-identity ops). Returned sorted by (tick, target, channel) with
// damping first. Deterministic under a fixed rng state.
std::vector<KrausOutcome> sample_error_events(const QuditLayout& layout, int ticks,
                                              const NoiseModel& model, Rng& rng);
std::vector<KrausOutcome> sample_error_events(const Program& program, const NoiseModel& model,
                                              Rng& rng);

}  // namespace qram
