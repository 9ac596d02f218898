#include "qram/program.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace qram {

std::string to_string(OpType t) {
    switch (t) {
        case OpType::AddressBusInput: return "address_bus_input";
        case OpType::DataBusInput: return "data_bus_input";
        case OpType::ControlledDataBusInput: return "controlled_data_bus_input";
        case OpType::Routing: return "routing";
        case OpType::InternalSwap: return "internal_swap";
        case OpType::DataCopy: return "data_copy";
    }
    return "?";
}

std::string to_string(RouteDir d) {
    switch (d) {
        case RouteDir::Down: return "down";
        case RouteDir::Up: return "up";
        case RouteDir::Bi: return "bi";
    }
    return "?";
}

std::string to_string(BusDir d) { return d == BusDir::In ? "in" : "out"; }

std::string to_string(Phase p) {
    switch (p) {
        case Phase::AddressSetting: return "address_setting";
        case Phase::DataFetch: return "data_fetch";
        case Phase::Uncomputing: return "uncomputing";
    }
    return "?";
}

std::pair<int, int> qutrit_internal_swap(int a, int d) {
    if (a == 0 && d == 0) return {1, 0};  // W,0 -> L,0
    if (a == 0 && d == 1) return {2, 0};  // W,1 -> R,0
    if (a == 1 && d == 0) return {0, 0};  // L,0 -> W,0
    if (a == 2 && d == 0) return {0, 1};  // R,0 -> W,1
    return {a, d};                        // L,1 and R,1 fixed
}

std::vector<int> op_support(const LayeredOp& op, const QuditLayout& layout) {
    std::vector<int> s;
    const int n = layout.n;
    const int c = layout.c;
    auto all_layer_addresses = [&](int l) {
        for (int p = 0; p < (1 << l); ++p) s.push_back(layout.node_address({l, p}));
    };
    auto all_layer_data = [&](int l) {
        for (int p = 0; p < (1 << l); ++p)
            for (int b = 0; b < c; ++b) s.push_back(layout.node_data({l, p}, b));
    };

    switch (op.type) {
        case OpType::AddressBusInput:
            if (op.index < 0 || op.index >= n) throw std::invalid_argument("address digit out of range");
            s.push_back(layout.address_bus(op.index));
            s.push_back(layout.node_data({0, 0}, 0));
            break;
        case OpType::DataBusInput:
            if (op.index < 0 || op.index >= layout.k) throw std::invalid_argument("data digit out of range");
            s.push_back(layout.data_bus(op.index));
            s.push_back(layout.node_data({0, 0}, op.index % c));
            break;
        case OpType::ControlledDataBusInput: {
            if (op.index < 0 || op.index >= layout.k) throw std::invalid_argument("data digit out of range");
            if (op.high < 0 || op.high >= (1 << layout.m))
                throw std::invalid_argument("high value out of range");
            s.push_back(layout.data_bus(op.index));
            for (int i = 0; i < layout.m; ++i) s.push_back(layout.high_wire(i));
            s.push_back(layout.node_data({0, 0}, 0));
            break;
        }
        case OpType::Routing:
            // layer n-1 routing is disallowed: the data copy acts in place there
            if (op.index < 0 || op.index > n - 2) throw std::invalid_argument("routing layer out of range");
            all_layer_addresses(op.index);
            all_layer_data(op.index);
            all_layer_data(op.index + 1);
            break;
        case OpType::InternalSwap: {
            if (op.index < 0 || op.index >= n) throw std::invalid_argument("internal swap layer out of range");
            const int l = op.index;
            if (layout.scheme == Scheme::Qutrit) {
                if (l == 0) {
                    s.push_back(layout.node_address({0, 0}));
                    s.push_back(layout.node_data({0, 0}, 0));
                } else {
                    all_layer_addresses(l - 1);
                    for (int p = 0; p < (1 << l); ++p) {
                        s.push_back(layout.node_address({l, p}));
                        s.push_back(layout.node_data({l, p}, 0));
                    }
                }
            } else {
                for (int p = 0; p < (1 << l); ++p) {
                    s.push_back(layout.node_address({l, p}));
                    s.push_back(layout.node_data({l, p}, 0));
                }
            }
            break;
        }
        case OpType::DataCopy: {
            if (op.index < 0 || op.index >= layout.k || op.index % c != 0)
                throw std::invalid_argument("data copy digit out of range");
            if (op.high < 0 || op.high >= (1 << layout.m))
                throw std::invalid_argument("high value out of range");
            all_layer_addresses(n - 1);
            all_layer_data(n - 1);
            break;
        }
    }
    std::sort(s.begin(), s.end());
    return s;
}

namespace {

bool sorted_intersects(const std::vector<int>& a, const std::vector<int>& b) {
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return true;
        if (a[i] < b[j]) ++i; else ++j;
    }
    return false;
}

}  // namespace

std::vector<std::string> validate(const Program& program) {
    std::vector<std::string> problems;
    QuditLayout layout;
    try {
        program.spec.check();
        layout = program.layout();
    } catch (const std::exception& e) {
        problems.push_back(std::string("spec: ") + e.what());
        return problems;
    }

    // per-phase op counters
    std::map<int, int> a_count;                      // digit -> count (address setting)
    std::map<int, int> a_count_un;                   // digit -> count (uncomputing)
    std::map<std::pair<int, int>, int> din_count;    // (digit, high) -> entries
    std::map<std::pair<int, int>, int> dout_count;   // (digit, high) -> exits
    std::map<std::pair<int, int>, int> copy_count;   // (digit base, high) -> copies

    for (size_t t = 0; t < program.steps.size(); ++t) {
        const TimeStep& step = program.steps[t];
        std::vector<std::vector<int>> supports;
        for (const LayeredOp& op : step.ops) {
            try {
                supports.push_back(op_support(op, layout));
            } catch (const std::exception& e) {
                problems.push_back("step " + std::to_string(t) + ": " + e.what());
                supports.push_back({});
            }
            if (op.type == OpType::AddressBusInput) {
                if (step.phase == Phase::AddressSetting) a_count[op.index]++;
                if (step.phase == Phase::Uncomputing) a_count_un[op.index]++;
            }
            if (op.type == OpType::DataBusInput || op.type == OpType::ControlledDataBusInput) {
                auto key = std::make_pair(op.index, op.high);
                (op.bus_dir == BusDir::In ? din_count : dout_count)[key]++;
            }
            if (op.type == OpType::DataCopy) copy_count[{op.index, op.high}]++;
        }
        for (size_t i = 0; i < supports.size(); ++i)
            for (size_t j = i + 1; j < supports.size(); ++j)
                if (sorted_intersects(supports[i], supports[j]))
                    problems.push_back("step " + std::to_string(t) + ": ops " + std::to_string(i) +
                                       " and " + std::to_string(j) + " share a qudit");
    }

    const int series = 1 << program.m;
    for (int i = 0; i < program.spec.n; ++i) {
        if (a_count[i] != 1)
            problems.push_back("address setting applies A(" + std::to_string(i) + ") " +
                               std::to_string(a_count[i]) + " times (want 1)");
        if (a_count_un[i] != 1)
            problems.push_back("uncomputing applies A(" + std::to_string(i) + ") " +
                               std::to_string(a_count_un[i]) + " times (want 1)");
    }
    for (int hv = 0; hv < series; ++hv) {
        for (int d = 0; d < program.spec.k; ++d) {
            auto key = std::make_pair(d, program.hybrid() ? hv : 0);
            if (din_count[key] != 1 || dout_count[key] != 1) {
                problems.push_back("data fetch digit " + std::to_string(d) + " series " +
                                   std::to_string(hv) + ": entries " +
                                   std::to_string(din_count[key]) + ", exits " +
                                   std::to_string(dout_count[key]) + " (want 1 each)");
            }
        }
        for (int base = 0; base < program.spec.k; base += program.spec.bandwidth) {
            auto key = std::make_pair(base, program.hybrid() ? hv : 0);
            if (copy_count[key] != 1)
                problems.push_back("data copy batch " + std::to_string(base) + " series " +
                                   std::to_string(hv) + " applied " +
                                   std::to_string(copy_count[key]) + " times (want 1)");
        }
        if (!program.hybrid()) break;
    }
    return problems;
}

GateCost gate_cost(const Program& program) {
    GateCost cost;
    const int c = program.spec.bandwidth;
    for (const TimeStep& step : program.steps) {
        for (const LayeredOp& op : step.ops) {
            switch (op.type) {
                case OpType::Routing: {
                    const int64_t nodes = int64_t{1} << op.index;
                    if (op.dir == RouteDir::Bi) {
                        cost.controlled_swaps += 2 * nodes * c;
                    } else {
                        cost.swaps += nodes * c;
                        cost.controlled_swaps += nodes * c;
                    }
                    break;
                }
                case OpType::InternalSwap:
                    cost.other += int64_t{1} << op.index;
                    break;
                case OpType::DataCopy:
                    cost.other += (int64_t{1} << (program.spec.n - 1)) * c;
                    break;
                default:
                    cost.other += 1;
                    break;
            }
        }
    }
    return cost;
}

StepCountReport step_report(const Program& program) {
    StepCountReport r;
    r.total = program.tick_count();
    for (const TimeStep& step : program.steps) {
        switch (step.phase) {
            case Phase::AddressSetting: r.address_setting++; break;
            case Phase::DataFetch: r.data_fetch++; break;
            case Phase::Uncomputing: r.uncomputing++; break;
        }
    }
    return r;
}

}  // namespace qram
