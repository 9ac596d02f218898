#include "qram/protocols.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace qram {

namespace {

bool sorted_intersects(const std::vector<int>& a, const std::vector<int>& b) {
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return true;
        if (a[i] < b[j]) ++i; else ++j;
    }
    return false;
}

// As-early-as-possible list scheduling over the sequential op order: an op
// lands one tick after the latest earlier op whose support overlaps its own.
// Ops sharing a tick therefore have pairwise disjoint supports, and every
// overlapping pair keeps its original order, so the rewrite is
// semantics-preserving. Applied to the address-setting sequence
//   A(0) I(0) A(1) R(0) I(1) A(2) R(0) R(1) I(2) ...
// this reproduces the compacted 3n-1 tick schedule.
std::vector<std::vector<LayeredOp>> schedule_address_setting(const QuditLayout& layout) {
    const int n = layout.n;
    std::vector<LayeredOp> order;
    for (int i = 0; i < n; ++i) {
        order.push_back(LayeredOp::address_input(i));
        for (int l = 0; l < i; ++l) order.push_back(LayeredOp::routing(l, RouteDir::Down));
        order.push_back(LayeredOp::internal_swap(i));
    }

    std::vector<std::vector<LayeredOp>> ticks;
    std::vector<std::pair<int, std::vector<int>>> placed;  // (tick, support)
    for (const LayeredOp& op : order) {
        auto sup = op_support(op, layout);
        int t = 0;
        for (const auto& [pt, psup] : placed)
            if (pt >= t && sorted_intersects(sup, psup)) t = pt + 1;
        if (static_cast<int>(ticks.size()) <= t) ticks.resize(t + 1);
        ticks[t].push_back(op);
        placed.emplace_back(t, std::move(sup));
    }
    return ticks;
}

// Greedy placement of data-fetch chains: each chain (one digit batch, or one
// (series, digit) pair in the hybrid task) starts two ticks after its
// predecessor and is bumped forward, one tick at a time, until every op lands
// on a conflict-free tick. A down-routing landing on an up-routing of the
// same layer is not a conflict: one bidirectional routing serves both
// payloads, so the pair fuses into a single Bi op.
class FetchPlacer {
public:
    explicit FetchPlacer(const QuditLayout& layout) : layout_(layout) {}

    struct ChainOp {
        int offset;
        LayeredOp op;
    };

    void place_chain(const std::vector<ChainOp>& chain) {
        int e = last_entry_ + 2;
        for (const auto& [off, op] : chain) {
            if (op.type == OpType::DataBusInput || op.type == OpType::ControlledDataBusInput) {
                auto it = wire_release_.find(op.index);
                if (it != wire_release_.end()) e = std::max(e, it->second + 1 - off);
            }
        }
        e = std::max(e, 0);

        std::vector<std::vector<int>> sups;
        sups.reserve(chain.size());
        for (const auto& [off, op] : chain) sups.push_back(op_support(op, layout_));

        for (;; ++e) {
            std::vector<std::pair<int, int>> merges;  // (tick, op slot in that tick)
            bool ok = true;
            for (size_t i = 0; i < chain.size() && ok; ++i) {
                const int t = e + chain[i].offset;
                if (t >= static_cast<int>(ticks_.size())) continue;
                for (size_t j = 0; j < ticks_[t].size(); ++j) {
                    if (!sorted_intersects(sups[i], tick_sups_[t][j])) continue;
                    const LayeredOp& other = ticks_[t][j];
                    const LayeredOp& mine = chain[i].op;
                    const bool fusable = mine.type == OpType::Routing &&
                                         other.type == OpType::Routing &&
                                         other.index == mine.index && other.dir != mine.dir &&
                                         other.dir != RouteDir::Bi && mine.dir != RouteDir::Bi;
                    if (fusable) {
                        merges.emplace_back(t, static_cast<int>(j));
                    } else {
                        ok = false;
                        break;
                    }
                }
            }
            if (!ok) continue;

            for (auto [t, j] : merges) ticks_[t][j].dir = RouteDir::Bi;
            std::vector<char> merged(chain.size(), 0);
            for (size_t i = 0; i < chain.size(); ++i) {
                const int t = e + chain[i].offset;
                for (auto [mt, mj] : merges)
                    if (mt == t && sorted_intersects(sups[i], tick_sups_[mt][mj])) merged[i] = 1;
            }
            for (size_t i = 0; i < chain.size(); ++i) {
                if (merged[i]) continue;
                const int t = e + chain[i].offset;
                if (t >= static_cast<int>(ticks_.size())) {
                    ticks_.resize(t + 1);
                    tick_sups_.resize(t + 1);
                }
                ticks_[t].push_back(chain[i].op);
                tick_sups_[t].push_back(sups[i]);
                const LayeredOp& op = chain[i].op;
                if ((op.type == OpType::DataBusInput || op.type == OpType::ControlledDataBusInput) &&
                    op.bus_dir == BusDir::Out)
                    wire_release_[op.index] = t;
            }
            last_entry_ = e;
            return;
        }
    }

    std::vector<std::vector<LayeredOp>> take() { return std::move(ticks_); }

private:
    QuditLayout layout_;
    std::vector<std::vector<LayeredOp>> ticks_;
    std::vector<std::vector<std::vector<int>>> tick_sups_;
    std::map<int, int> wire_release_;
    int last_entry_ = -2;
};

// Round-trip chain of one digit batch: bus entry, descent to the leaf layer,
// data copy, ascent, bus exit. 2n+1 offsets for an n-layer tree.
std::vector<FetchPlacer::ChainOp> fetch_chain(const TreeSpec& spec, int base, int high,
                                              bool controlled) {
    std::vector<FetchPlacer::ChainOp> chain;
    const int n = spec.n;
    const int c = spec.bandwidth;
    for (int b = 0; b < c; ++b) {
        LayeredOp in = controlled ? LayeredOp::controlled_data_input(base + b, high, BusDir::In)
                                  : LayeredOp::data_input(base + b, BusDir::In);
        chain.push_back({0, in});
    }
    for (int l = 0; l <= n - 2; ++l) chain.push_back({1 + l, LayeredOp::routing(l, RouteDir::Down)});
    chain.push_back({n, LayeredOp::data_copy(base, high)});
    for (int l = n - 2; l >= 0; --l)
        chain.push_back({2 * n - 1 - l, LayeredOp::routing(l, RouteDir::Up)});
    for (int b = 0; b < c; ++b) {
        LayeredOp out = controlled ? LayeredOp::controlled_data_input(base + b, high, BusDir::Out)
                                   : LayeredOp::data_input(base + b, BusDir::Out);
        chain.push_back({2 * n, out});
    }
    return chain;
}

Program assemble(const TreeSpec& spec, int m, const std::string& protocol,
                 std::vector<std::vector<LayeredOp>> addr,
                 std::vector<std::vector<LayeredOp>> fetch) {
    Program p;
    p.spec = spec;
    p.m = m;
    p.protocol = protocol;
    const size_t addr_ticks = addr.size();
    for (auto& ops : addr) p.steps.push_back({Phase::AddressSetting, std::move(ops)});
    for (auto& ops : fetch) p.steps.push_back({Phase::DataFetch, std::move(ops)});
    // Uncomputing reverses the compacted address setting tick by tick; every
    // op is self-inverse, with routing now carrying payloads upward.
    for (size_t i = 0; i < addr_ticks; ++i) {
        TimeStep step = p.steps[addr_ticks - 1 - i];
        step.phase = Phase::Uncomputing;
        for (LayeredOp& op : step.ops)
            if (op.type == OpType::Routing) op.dir = RouteDir::Up;
        p.steps.push_back(std::move(step));
    }
    return p;
}

}  // namespace

Program compile_nonparallel(const TreeSpec& spec) {
    spec.check();
    if (spec.bandwidth != 1)
        throw std::invalid_argument("nonparallel protocol requires bandwidth 1");
    const QuditLayout layout(spec, 0);
    auto addr = schedule_address_setting(layout);

    std::vector<std::vector<LayeredOp>> fetch;
    for (int i = 0; i < spec.k; ++i)
        for (const auto& [off, op] : fetch_chain(spec, i, 0, false)) {
            (void)off;  // strictly sequential: one op per tick
            fetch.push_back({op});
        }
    return assemble(spec, 0, "nonparallel", std::move(addr), std::move(fetch));
}

Program compile_parallel(const TreeSpec& spec) {
    spec.check();
    if (spec.bandwidth != 1)
        throw std::invalid_argument("parallel protocol requires bandwidth 1");
    const QuditLayout layout(spec, 0);
    auto addr = schedule_address_setting(layout);

    FetchPlacer placer(layout);
    for (int i = 0; i < spec.k; ++i) placer.place_chain(fetch_chain(spec, i, 0, false));
    return assemble(spec, 0, "parallel", std::move(addr), placer.take());
}

Program compile_high_bandwidth(const TreeSpec& spec) {
    spec.check();
    const int c = spec.bandwidth;
    if (c > spec.k || spec.k % c != 0)
        throw std::invalid_argument("bandwidth c must divide the word length k");
    const QuditLayout layout(spec, 0);
    auto addr = schedule_address_setting(layout);

    FetchPlacer placer(layout);
    for (int base = 0; base < spec.k; base += c)
        placer.place_chain(fetch_chain(spec, base, 0, false));
    return assemble(spec, 0, "hb-parallel", std::move(addr), placer.take());
}

Program compile_hybrid_parallel(const TreeSpec& spec, int m) {
    spec.check();
    if (m < 1) throw std::invalid_argument("hybrid-parallel requires m >= 1");
    if (m > 20) throw std::invalid_argument("hybrid-parallel m too large");
    if (spec.bandwidth != 1)
        throw std::invalid_argument("hybrid-parallel requires bandwidth 1");
    const QuditLayout layout(spec, m);
    auto addr = schedule_address_setting(layout);

    FetchPlacer placer(layout);
    for (int hv = 0; hv < (1 << m); ++hv)
        for (int i = 0; i < spec.k; ++i)
            placer.place_chain(fetch_chain(spec, i, hv, true));
    return assemble(spec, m, "hybrid-parallel", std::move(addr), placer.take());
}

Program compile(const std::string& protocol, const TreeSpec& spec, int m) {
    if (protocol == "nonparallel") return compile_nonparallel(spec);
    if (protocol == "parallel") return compile_parallel(spec);
    if (protocol == "hb-parallel") return compile_high_bandwidth(spec);
    if (protocol == "hybrid-parallel") return compile_hybrid_parallel(spec, m);
    throw std::invalid_argument("unknown protocol: " + protocol);
}

}  // namespace qram
