#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qram/noise.hpp"
#include "qram/program.hpp"
#include "qram/query.hpp"

namespace qram {

struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Index of the bus part of a dense state: bus and high wires are the lowest
// qudits and all have dimension 2, so they form the low bits of the index.
uint64_t bus_basis_index(const QuditLayout& layout, uint64_t high, uint64_t address,
                         uint64_t word);

// Bus-basis vector of the ideal query output (z XOR m per branch); pass
// nullptr as memory for the identity map (the input itself).
std::vector<cplx> ideal_bus_vector(const QueryInput& input, const MemoryTable* memory,
                                   const QuditLayout& layout);

// Exact state-vector simulator over the full tree + bus Hilbert space.
// Serves as the oracle for the branch simulator on small instances.
class DenseSim {
public:
    static constexpr int64_t kMaxAmplitudes = int64_t{1} << 26;

    DenseSim(const Program& program, const MemoryTable& memory);

    const QuditLayout& layout() const { return layout_; }
    int64_t dimension() const { return dim_; }

    void reset(const QueryInput& input);
    void apply_program();               // all steps, noiseless
    void apply_step(const TimeStep& step);

    // Current amplitudes over the bus basis with the tree idle, plus the
    // probability mass left on non-idle tree configurations.
    std::vector<cplx> bus_amplitudes() const;
    double tree_leak() const;           // total non-idle tree mass
    double norm2() const;

    struct NoiselessResult {
        std::vector<cplx> bus;
        double restoration_dev = 0.0;   // non-idle tree mass after uncomputing
        double norm_dev = 0.0;          // max |norm - 1| seen across ticks
    };
    NoiselessResult run_noiseless(const QueryInput& input);

    struct TrajectoryResult {
        double fidelity = 0.0;
        double lambda = -1.0;           // filled by callers that classify events
        double weight = 1.0;            // product of sampled outcome probabilities
        std::vector<KrausOutcome> events;
    };
    // Renormalize-and-weight unraveling: damping outcomes sampled with their
    // exact conditional probabilities, depolarizing Weyls at flat rate p.
    TrajectoryResult run_trajectory(const QueryInput& input, const NoiseModel& model, Rng& rng);

    // First-order mode: applies a pre-sampled event list (plus the no-jump
    // damping weights on every tree qudit each tick) and returns the exact
    // post-selected fidelity of that Kraus configuration.
    double run_with_events(const QueryInput& input, const NoiseModel& model,
                           const std::vector<KrausOutcome>& events);

    FidelityEstimate estimate_fidelity(const QueryInput& input, const NoiseModel& model,
                                       int trajectories, uint64_t seed, int threads = 1) const;

    // Debug dump: non-negligible amplitudes as a JSON array of
    // [basis_index, re, im].
    std::string state_to_json(double cutoff = 1e-12) const;

    // Raw amplitude access (debugging and test oracles).
    const std::vector<cplx>& raw() const { return state_; }
    void set_raw(std::vector<cplx> amps);

private:
    double fidelity_against_ideal() const;

    void apply_op(const LayeredOp& op);
    void apply_cnot(int control, int target);
    void apply_swap(int q1, int q2);
    void apply_cswap_high(uint64_t high_value, int q1, int q2);
    void apply_h(int q);
    void apply_routing(const LayeredOp& op);
    void apply_internal_swap(const LayeredOp& op);
    void apply_data_copy(const LayeredOp& op);
    void apply_weyl(int q, int a, int b);
    void level_masses(int q, double* out) const;
    void apply_jump(int q, int level, double scale = 1.0);   // scale * |0><level|
    void apply_no_jump(int q, double s, double scale = 1.0); // scale * diag(1, s, ...)
    void scale(double f);

    template <typename F>
    void for_each_base(const std::vector<int>& qudits, F&& f) const;

    Program program_;
    MemoryTable memory_;
    QuditLayout layout_;
    std::vector<int> dims_;
    std::vector<int64_t> strides_;
    int64_t dim_ = 0;
    uint64_t bus_dim_ = 0;
    std::vector<cplx> state_;
    std::vector<cplx> ideal_;
    double norm_dev_ = 0.0;
};

}  // namespace qram
