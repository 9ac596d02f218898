#pragma once

#include <complex>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "qram/dense_sim.hpp"
#include "qram/noise.hpp"
#include "qram/program.hpp"
#include "qram/query.hpp"

namespace qram {

// Tracked symbol alphabet. Address qutrits: W/L/R; address qubits: 0/1;
// data qubits (tree banks and data-bus wires): 0/1/+/-.
namespace sym {
constexpr uint8_t W = 0;
constexpr uint8_t L = 1;
constexpr uint8_t R = 2;
constexpr uint8_t Plus = 2;
constexpr uint8_t Minus = 3;
}  // namespace sym

struct Branch {
    uint64_t high = 0;
    uint64_t address = 0;
    uint64_t word0 = 0;
    cplx alpha{1.0, 0.0};  // input amplitude
    cplx coef{1.0, 0.0};   // current amplitude: alpha * damping weight * phase
    bool alive = true;
    int exc_full = 0;  // tree symbols carrying a sqrt(1-gamma) no-jump weight
    int exc_half = 0;  // tree symbols in {+,-}: weight sqrt(1-gamma/2)
    std::vector<uint8_t> sym;       // per layout qudit (address-bus slots unused)
    std::vector<uint8_t> occ;       // payload occupancy, tree qudits only
    std::vector<uint16_t> nodes;    // touched tree nodes (flat ids), sorted unique
};

using BranchTable = std::vector<Branch>;

// Scalable trajectory simulator: each address branch evolves as a symbolic
// basis configuration with an amplitude. Exact for the protocol's gate set
// and the sampled Kraus/Weyl operators.
class BranchSim {
public:
    BranchSim(const Program& program, const MemoryTable& memory, const QueryInput& input);

    const QuditLayout& layout() const { return layout_; }

    struct NoiselessReport {
        bool restored = false;        // every tree qudit idle and unoccupied
        double max_bus_deviation = 0.0;  // vs the ideal XOR map
    };
    const NoiselessReport& noiseless_report() const { return report_; }

    // Final bus amplitudes of a noiseless run (pass >= 1 applies the program
    // that many times; 2 checks the double-query involution).
    std::vector<std::pair<uint64_t, cplx>> noiseless_bus(int passes = 1) const;
    double noiseless_deviation(int passes = 1) const;

    // Table state after the first `ticks` steps of a noiseless run.
    BranchTable table_after(int ticks) const;

    struct Outcome {
        double fidelity = 0.0;  // normalized fidelity of the post-selected state
        double lambda = 1.0;
    };
    Outcome run_with_events(const std::vector<KrausOutcome>& events,
                            const NoiseModel& model) const;
    Outcome run_trajectory(const NoiseModel& model, Rng& rng) const;

    // Trajectory noise realization: damping jumps are proposed per excited
    // (qudit, level, tick) of the noiseless occupancy trace at rate
    // gamma * mass (first-order exact; post-event occupancy drift contributes
    // at O(eps^2)); depolarizing events are flat -- that sampling is already
    // the exact channel distribution.
    std::vector<KrausOutcome> sample_trajectory_events(const NoiseModel& model, Rng& rng) const;

    // Good-branch fraction of an event list against the noiseless activity
    // trace (branch i is good iff no event hits a qudit while it is active
    // for branch i).
    double lambda_of(const std::vector<KrausOutcome>& events) const;

    FidelityEstimate estimate_fidelity(const NoiseModel& model, int trajectories, uint64_t seed,
                                       int threads = 1) const;

private:
    struct ActiveIntervals {
        // per branch: qudit -> [start, end) tick intervals
        std::vector<std::unordered_map<int, std::vector<std::pair<int, int>>>> per_branch;
    };

    BranchTable make_initial() const;
    void apply_step(BranchTable& table, const TimeStep& step) const;
    void apply_op(BranchTable& table, const LayeredOp& op, Phase phase) const;
    void apply_event(BranchTable& table, const KrausOutcome& ev) const;
    void apply_intswap_pair(Branch& b, int aq, int dq) const;
    void route_node(Branch& b, NodeId x) const;
    // (unnormalized ideal overlap, table norm^2)
    std::pair<double, double> overlap_of(const BranchTable& table) const;
    void run_reference();

    void set_sym(Branch& b, int q, uint8_t s) const;
    void touch_node(Branch& b, int node_flat) const;
    int excitation(int q, uint8_t s) const;  // 0 none, 1 full, 2 half

    struct DampSlot {
        int tick = 0;
        int target = 0;
        int level = 1;
        double mass = 0.0;  // noiseless occupancy weight of `level` on `target`
    };

    Program program_;
    MemoryTable memory_;
    QueryInput input_;
    QuditLayout layout_;
    std::vector<int> layer_of_flat_;
    BranchTable initial_;
    NoiselessReport report_;
    ActiveIntervals active_;
    std::vector<DampSlot> damp_slots_;  // tick-major
    // ideal (word, amplitude) rows per (high << n) | address
    std::unordered_map<uint64_t, std::vector<std::pair<uint64_t, cplx>>> ideal_by_address_;
};

}  // namespace qram
