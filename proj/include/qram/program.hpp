#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qram/topology.hpp"

namespace qram {

enum class OpType {
    AddressBusInput,
    DataBusInput,
    ControlledDataBusInput,
    Routing,
    InternalSwap,
    DataCopy,
};

enum class RouteDir { Down, Up, Bi };
enum class BusDir { In, Out };
enum class Phase { AddressSetting, DataFetch, Uncomputing };

std::string to_string(OpType t);
std::string to_string(RouteDir d);
std::string to_string(BusDir d);
std::string to_string(Phase p);

struct LayeredOp {
    OpType type = OpType::Routing;
    int index = 0;                    // digit for bus inputs / data copy, layer for routing / internal swap
    RouteDir dir = RouteDir::Down;    // routing only
    BusDir bus_dir = BusDir::In;      // (controlled) data bus input only
    int high = 0;                     // series value: controlled bus input, data copy

    static LayeredOp address_input(int digit) { return {OpType::AddressBusInput, digit}; }
    static LayeredOp data_input(int digit, BusDir d) {
        LayeredOp op{OpType::DataBusInput, digit};
        op.bus_dir = d;
        return op;
    }
    static LayeredOp controlled_data_input(int digit, int high, BusDir d) {
        LayeredOp op{OpType::ControlledDataBusInput, digit};
        op.bus_dir = d;
        op.high = high;
        return op;
    }
    static LayeredOp routing(int layer, RouteDir d) {
        LayeredOp op{OpType::Routing, layer};
        op.dir = d;
        return op;
    }
    static LayeredOp internal_swap(int layer) { return {OpType::InternalSwap, layer}; }
    static LayeredOp data_copy(int digit, int high = 0) {
        LayeredOp op{OpType::DataCopy, digit};
        op.high = high;
        return op;
    }

    bool operator==(const LayeredOp& o) const {
        return type == o.type && index == o.index && dir == o.dir && bus_dir == o.bus_dir &&
               high == o.high;
    }
};

struct TimeStep {
    Phase phase = Phase::AddressSetting;
    std::vector<LayeredOp> ops;
};

struct Program {
    TreeSpec spec;
    int m = 0;  // high-address width; 0 for plain tasks
    std::string protocol;
    std::vector<TimeStep> steps;

    bool hybrid() const { return m > 0; }
    // Hybrid tasks phase-encode the traveling data in both schemes; plain
    // qubit-scheme programs do too. Plain qutrit programs copy bits.
    bool phase_encoded_copy() const { return hybrid() || spec.scheme == Scheme::Qubit; }
    QuditLayout layout() const { return QuditLayout(spec, m); }
    int tick_count() const { return static_cast<int>(steps.size()); }
};

// Exact read/write qudit set of an op, as sorted layout indices.
std::vector<int> op_support(const LayeredOp& op, const QuditLayout& layout);

// Empty result == valid. Diagnostics are returned as data, one string per
// problem (index range, same-tick support overlap, per-phase op counts).
std::vector<std::string> validate(const Program& program);

struct GateCost {
    int64_t swaps = 0;
    int64_t controlled_swaps = 0;
    int64_t other = 0;
};
GateCost gate_cost(const Program& program);

struct StepCountReport {
    int total = 0;
    int address_setting = 0;
    int data_fetch = 0;
    int uncomputing = 0;
};
StepCountReport step_report(const Program& program);

// ---- local transition tables shared by both simulators ----

// Qutrit address levels: 0 = W (idle), 1 = L, 2 = R.
// Qubit address levels: 0 = L, 1 = R.

// Internal swap on one node's (address, data) pair, qutrit scheme. Involution:
// (W,0) <-> (L,0), (W,1) <-> (R,0); (L,1), (R,1) fixed.
std::pair<int, int> qutrit_internal_swap(int a, int d);

// Program JSON (see README for the schema).
std::string program_to_json(const Program& program, int indent = 2);
Program program_from_json(const std::string& text);

}  // namespace qram
