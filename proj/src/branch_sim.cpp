#include "qram/branch_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

namespace qram {

namespace {

// H on a data symbol: 0 <-> +, 1 <-> -
uint8_t h_symbol(uint8_t s) {
    switch (s) {
        case 0: return sym::Plus;
        case sym::Plus: return 0;
        case 1: return sym::Minus;
        default: return 1;
    }
}

}  // namespace

BranchSim::BranchSim(const Program& program, const MemoryTable& memory, const QueryInput& input)
    : program_(program), memory_(memory), input_(input), layout_(program.layout()) {
    if (memory.n != program.spec.n || memory.m != program.m || memory.k < program.spec.k)
        throw std::invalid_argument("memory table does not match the program instance");
    layer_of_flat_.resize(layout_.nodes);
    for (int l = 0, f = 0; l < layout_.n; ++l)
        for (int p = 0; p < (1 << l); ++p) layer_of_flat_[f++] = l;

    for (const InputBranch& b : input.branches) {
        const uint64_t key = (b.high << program.spec.n) | b.address;
        const uint64_t ideal_word = b.word ^ memory_.word(b.high, b.address);
        auto& rows = ideal_by_address_[key];
        bool found = false;
        for (auto& [w, a] : rows)
            if (w == ideal_word) {
                a += b.amp;
                found = true;
            }
        if (!found) rows.emplace_back(ideal_word, b.amp);
    }
    initial_ = make_initial();
    run_reference();
}

BranchTable BranchSim::make_initial() const {
    BranchTable table;
    table.reserve(input_.branches.size());
    for (const InputBranch& ib : input_.branches) {
        Branch b;
        b.high = ib.high;
        b.address = ib.address;
        b.word0 = ib.word;
        b.alpha = ib.amp;
        b.coef = ib.amp;
        b.sym.assign(layout_.total, 0);
        for (int j = 0; j < layout_.k; ++j)
            b.sym[layout_.data_bus(j)] = static_cast<uint8_t>((ib.word >> j) & 1u);
        b.occ.assign(layout_.tree_qudit_count(), 0);
        table.push_back(std::move(b));
    }
    return table;
}

int BranchSim::excitation(int q, uint8_t s) const {
    if (s == 0) return 0;
    if (layout_.is_tree_address(q)) return 1;  // L/R or address-qubit 1
    if (s == 1) return 1;
    return 2;  // + or -
}

void BranchSim::set_sym(Branch& b, int q, uint8_t s) const {
    if (layout_.is_tree(q)) {
        const int before = excitation(q, b.sym[q]);
        const int after = excitation(q, s);
        if (before != after) {
            if (before == 1) --b.exc_full;
            if (before == 2) --b.exc_half;
            if (after == 1) ++b.exc_full;
            if (after == 2) ++b.exc_half;
        }
    }
    b.sym[q] = s;
}

void BranchSim::touch_node(Branch& b, int node_flat) const {
    const uint16_t f = static_cast<uint16_t>(node_flat);
    auto it = std::lower_bound(b.nodes.begin(), b.nodes.end(), f);
    if (it == b.nodes.end() || *it != f) b.nodes.insert(it, f);
}

void BranchSim::apply_intswap_pair(Branch& b, int aq, int dq) const {
    const uint8_t a = b.sym[aq];
    const uint8_t d = b.sym[dq];
    if (d >= 2) return;  // +/- payloads never coincide with internal swaps
    const auto [a2, d2] = qutrit_internal_swap(a, d);
    if (a2 == a && d2 == d) return;
    const int ao = aq - layout_.tree_begin;
    const int dof = dq - layout_.tree_begin;
    if (a == sym::W) {  // setting: content moves data -> address
        b.occ[ao] = b.occ[dof];
        b.occ[dof] = 0;
    } else {  // unsetting: content moves address -> data
        b.occ[dof] = b.occ[ao];
        b.occ[ao] = 0;
    }
    set_sym(b, aq, a2);
    set_sym(b, dq, static_cast<uint8_t>(d2));
}

void BranchSim::route_node(Branch& b, NodeId x) const {
    const bool qutrit = layout_.scheme == Scheme::Qutrit;
    const uint8_t a = b.sym[layout_.node_address(x)];
    int side;
    if (qutrit) {
        if (a == sym::L) side = 0;
        else if (a == sym::R) side = 1;
        else return;
    } else {
        side = a;  // 0 routes left, 1 routes right
    }
    const NodeId child = side == 0 ? x.left() : x.right();
    bool moved = false;
    for (int bank = 0; bank < layout_.c; ++bank) {
        const int dp = layout_.node_data(x, bank);
        const int dc = layout_.node_data(child, bank);
        const int dpo = dp - layout_.tree_begin;
        const int dco = dc - layout_.tree_begin;
        if (b.sym[dp] == b.sym[dc] && b.occ[dpo] == b.occ[dco]) continue;
        const uint8_t tp = b.sym[dp];
        const uint8_t tc = b.sym[dc];
        set_sym(b, dp, tc);
        set_sym(b, dc, tp);
        std::swap(b.occ[dpo], b.occ[dco]);
        moved = true;
    }
    if (moved) {
        touch_node(b, layout_.node_flat(child));
        touch_node(b, layout_.node_flat(x));
    }
}

void BranchSim::apply_op(BranchTable& table, const LayeredOp& op, Phase phase) const {
    const int n = layout_.n;
    const int c = layout_.c;
    const bool qutrit = layout_.scheme == Scheme::Qutrit;

    for (Branch& b : table) {
        if (!b.alive) continue;
        switch (op.type) {
            case OpType::AddressBusInput: {
                const int q = layout_.node_data({0, 0}, 0);
                const int bit = address_bit(b.address, n, op.index);
                const uint8_t s = b.sym[q];
                if (bit) {
                    if (s <= 1) set_sym(b, q, s ^ 1);
                    else if (s == sym::Minus) b.coef = -b.coef;
                }
                b.occ[q - layout_.tree_begin] = phase == Phase::Uncomputing ? 0 : 1;
                touch_node(b, 0);
                break;
            }
            case OpType::DataBusInput: {
                const int busq = layout_.data_bus(op.index);
                const int rootq = layout_.node_data({0, 0}, op.index % c);
                const bool h = layout_.scheme == Scheme::Qubit;
                if (h && op.bus_dir == BusDir::In) b.sym[busq] = h_symbol(b.sym[busq]);
                const uint8_t t = b.sym[busq];
                const uint8_t r = b.sym[rootq];
                set_sym(b, rootq, t);
                b.sym[busq] = r;
                if (h && op.bus_dir == BusDir::Out) b.sym[busq] = h_symbol(b.sym[busq]);
                b.occ[rootq - layout_.tree_begin] = op.bus_dir == BusDir::In ? 1 : 0;
                touch_node(b, 0);
                break;
            }
            case OpType::ControlledDataBusInput: {
                const int busq = layout_.data_bus(op.index);
                const int rootq = layout_.node_data({0, 0}, 0);
                if (op.bus_dir == BusDir::In) b.sym[busq] = h_symbol(b.sym[busq]);
                if (b.high == static_cast<uint64_t>(op.high)) {
                    const uint8_t t = b.sym[busq];
                    const uint8_t r = b.sym[rootq];
                    set_sym(b, rootq, t);
                    b.sym[busq] = r;
                    b.occ[rootq - layout_.tree_begin] = op.bus_dir == BusDir::In ? 1 : 0;
                    touch_node(b, 0);
                }
                if (op.bus_dir == BusDir::Out) b.sym[busq] = h_symbol(b.sym[busq]);
                break;
            }
            case OpType::Routing: {
                const int l = op.index;
                // parents with any chance of moving a payload, from the
                // branch's touched-node list
                uint16_t parents[128];
                int np = 0;
                bool overflow = false;
                for (uint16_t f : b.nodes) {
                    const int fl = layer_of_flat_[f];
                    uint16_t parent;
                    if (fl == l) parent = f;
                    else if (fl == l + 1) parent = static_cast<uint16_t>((f - 1) / 2);
                    else continue;
                    bool seen = false;
                    for (int i = 0; i < np; ++i)
                        if (parents[i] == parent) { seen = true; break; }
                    if (seen) continue;
                    if (np == 128) { overflow = true; break; }
                    parents[np++] = parent;
                }
                if (overflow) {  // heavy corruption: fall back to the whole layer
                    np = 0;
                    for (int p = 0; p < (1 << l) && np < 128; ++p)
                        parents[np++] = static_cast<uint16_t>((1 << l) - 1 + p);
                    if ((1 << l) > 128) np = -1;
                }
                if (np < 0) {  // layer too wide for the fallback buffer: scan directly
                    for (int p = 0; p < (1 << l); ++p) route_node(b, {l, p});
                    break;
                }
                for (int i = 0; i < np; ++i)
                    route_node(b, {l, parents[i] - ((1 << l) - 1)});
                break;
            }
            case OpType::InternalSwap: {
                const int l = op.index;
                if (!qutrit) {
                    for (uint16_t f : b.nodes) {
                        if (layer_of_flat_[f] != l) continue;
                        const int p = f - ((1 << l) - 1);
                        const int aq = layout_.node_address({l, p});
                        const int dq = layout_.node_data({l, p}, 0);
                        if (b.sym[dq] >= 2) continue;  // +/- never meets an internal swap
                        const uint8_t ta = b.sym[aq];
                        const uint8_t td = b.sym[dq];
                        if (ta == td && b.occ[aq - layout_.tree_begin] == b.occ[dq - layout_.tree_begin])
                            continue;
                        set_sym(b, aq, td);
                        set_sym(b, dq, ta);
                        std::swap(b.occ[aq - layout_.tree_begin], b.occ[dq - layout_.tree_begin]);
                    }
                    break;
                }
                if (l == 0) {
                    apply_intswap_pair(b, layout_.node_address({0, 0}), layout_.node_data({0, 0}, 0));
                    touch_node(b, 0);
                    break;
                }
                uint16_t parents[64];
                int np = 0;
                for (uint16_t f : b.nodes) {
                    if (layer_of_flat_[f] != l - 1) continue;
                    bool seen = false;
                    for (int i = 0; i < np; ++i)
                        if (parents[i] == f) { seen = true; break; }
                    if (!seen && np < 64) parents[np++] = f;
                }
                for (int i = 0; i < np; ++i) {
                    const int p = parents[i] - ((1 << (l - 1)) - 1);
                    const NodeId x{l - 1, p};
                    const uint8_t a = b.sym[layout_.node_address(x)];
                    if (a != sym::L && a != sym::R) continue;
                    const NodeId child = a == sym::L ? x.left() : x.right();
                    apply_intswap_pair(b, layout_.node_address(child), layout_.node_data(child, 0));
                    touch_node(b, layout_.node_flat(child));
                }
                break;
            }
            case OpType::DataCopy: {
                const int leaf_layer = n - 1;
                const bool phase_style = program_.phase_encoded_copy();
                for (uint16_t f : b.nodes) {
                    if (layer_of_flat_[f] != leaf_layer) continue;
                    const int p = f - ((1 << leaf_layer) - 1);
                    const uint8_t a = b.sym[layout_.node_address({leaf_layer, p})];
                    uint64_t cell;
                    if (qutrit) {
                        if (a == sym::L) cell = 2 * p;
                        else if (a == sym::R) cell = 2 * p + 1;
                        else continue;
                    } else {
                        cell = 2 * p + (a & 1);
                    }
                    for (int bank = 0; bank < c; ++bank) {
                        const int digit = op.index + bank;
                        if (!memory_.bit(op.high, cell, digit)) continue;
                        const int dq = layout_.node_data({leaf_layer, p}, bank);
                        const uint8_t s = b.sym[dq];
                        if (phase_style) {
                            if (s == 1) b.coef = -b.coef;
                            else if (s == sym::Plus) set_sym(b, dq, sym::Minus);
                            else if (s == sym::Minus) set_sym(b, dq, sym::Plus);
                        } else {
                            if (s <= 1) set_sym(b, dq, s ^ 1);
                            else if (s == sym::Minus) b.coef = -b.coef;
                        }
                    }
                }
                break;
            }
        }
    }
}

void BranchSim::apply_step(BranchTable& table, const TimeStep& step) const {
    for (const LayeredOp& op : step.ops) apply_op(table, op, step.phase);
}

void BranchSim::apply_event(BranchTable& table, const KrausOutcome& ev) const {
    const int q = ev.target;
    const int d = layout_.dim(q);
    const cplx w3[3] = {cplx{1.0, 0.0}, cplx{-0.5, std::sqrt(3.0) / 2.0},
                        cplx{-0.5, -std::sqrt(3.0) / 2.0}};
    const int node_flat = (q - layout_.tree_begin) / (1 + layout_.c);
    for (Branch& b : table) {
        if (!b.alive) continue;
        const uint8_t s = b.sym[q];
        if (ev.channel == ChannelKind::Damping) {
            if (d == 3) {
                if (s == ev.index) set_sym(b, q, 0);
                else {
                    b.alive = false;
                    b.coef = cplx{0.0, 0.0};
                    continue;
                }
            } else {
                if (s == 1) set_sym(b, q, 0);
                else if (s == sym::Plus) {
                    set_sym(b, q, 0);
                    b.coef *= M_SQRT1_2;
                } else if (s == sym::Minus) {
                    set_sym(b, q, 0);
                    b.coef *= -M_SQRT1_2;
                } else {
                    b.alive = false;
                    b.coef = cplx{0.0, 0.0};
                    continue;
                }
            }
        } else {
            const int a = ev.index / d;
            const int z = ev.index % d;
            if (d == 3) {
                if (z && s) b.coef *= w3[(z * s) % 3];
                if (a) set_sym(b, q, static_cast<uint8_t>((s + a) % 3));
            } else if (s <= 1) {
                if (z && s) b.coef = -b.coef;
                if (a) set_sym(b, q, s ^ 1);
            } else {
                uint8_t s2 = z ? (s == sym::Plus ? sym::Minus : sym::Plus) : s;
                if (a && s2 == sym::Minus) b.coef = -b.coef;
                set_sym(b, q, s2);
            }
        }
        touch_node(b, node_flat);
    }
}

std::pair<double, double> BranchSim::overlap_of(const BranchTable& table) const {
    const int tree_q = layout_.tree_qudit_count();
    std::unordered_map<std::string, cplx> groups;
    double n2 = 0.0;
    std::string key(tree_q, '\0');
    std::vector<int> flips;  // qudits holding +/- symbols

    for (const Branch& b : table) {
        if (!b.alive || b.coef == cplx{0.0, 0.0}) continue;
        n2 += std::norm(b.coef);
        const auto rows = ideal_by_address_.find((b.high << layout_.n) | b.address);
        if (rows == ideal_by_address_.end()) continue;

        flips.clear();
        for (int j = 0; j < layout_.k; ++j)
            if (b.sym[layout_.data_bus(j)] >= 2) flips.push_back(layout_.data_bus(j));
        for (int q = layout_.tree_begin; q < layout_.total; ++q)
            if (!layout_.is_tree_address(q) && b.sym[q] >= 2) flips.push_back(q);
        if (flips.size() > 20) continue;  // vanishing overlap; cannot happen in practice

        const double root = std::pow(M_SQRT1_2, static_cast<double>(flips.size()));
        const uint64_t combos = uint64_t{1} << flips.size();
        for (uint64_t cbo = 0; cbo < combos; ++cbo) {
            double sign = 1.0;
            for (size_t i = 0; i < flips.size(); ++i)
                if (((cbo >> i) & 1u) && b.sym[flips[i]] == sym::Minus) sign = -sign;
            // resolve word and tree configuration for this combination
            uint64_t word = 0;
            for (int j = 0; j < layout_.k; ++j) {
                const int q = layout_.data_bus(j);
                uint8_t s = b.sym[q];
                if (s >= 2) {
                    size_t fi = 0;
                    while (flips[fi] != q) ++fi;
                    s = static_cast<uint8_t>((cbo >> fi) & 1u);
                }
                word |= static_cast<uint64_t>(s & 1u) << j;
            }
            for (int q = layout_.tree_begin; q < layout_.total; ++q) {
                uint8_t s = b.sym[q];
                if (!layout_.is_tree_address(q) && s >= 2) {
                    size_t fi = 0;
                    while (flips[fi] != q) ++fi;
                    s = static_cast<uint8_t>((cbo >> fi) & 1u);
                }
                key[q - layout_.tree_begin] = static_cast<char>(s);
            }
            cplx ideal_amp{0.0, 0.0};
            for (const auto& [w, amp] : rows->second)
                if (w == word) { ideal_amp = amp; break; }
            if (ideal_amp == cplx{0.0, 0.0}) continue;
            groups[key] += std::conj(ideal_amp) * b.coef * root * sign;
        }
    }
    double f = 0.0;
    for (const auto& [k, acc] : groups) f += std::norm(acc);
    return {f, n2};
}

void BranchSim::run_reference() {
    BranchTable t = initial_;
    const size_t nb = t.size();
    active_.per_branch.assign(nb, {});
    std::vector<std::vector<int>> prev_active(nb);
    std::vector<std::unordered_map<int, int>> open_since(nb);

    const int ticks = program_.tick_count();
    std::vector<int> cur;
    // per (qudit, excited level): noiseless occupancy mass at the current tick
    std::unordered_map<int64_t, double> masses;
    for (int tick = 0; tick < ticks; ++tick) {
        apply_step(t, program_.steps[tick]);
        masses.clear();
        for (size_t bi = 0; bi < nb; ++bi) {
            Branch& b = t[bi];
            const double w = std::norm(b.alpha);
            cur.clear();
            for (uint16_t f : b.nodes) {
                const int base = layout_.tree_begin + f * (1 + layout_.c);
                for (int j = 0; j <= layout_.c; ++j) {
                    const int q = base + j;
                    const uint8_t s = b.sym[q];
                    if (s != 0 || b.occ[q - layout_.tree_begin] != 0) cur.push_back(q);
                    if (s == 0) continue;
                    if (layout_.is_tree_address(q) || s == 1) {
                        const int lev = layout_.is_tree_address(q) ? s : 1;
                        masses[(int64_t{q} << 3) | lev] += w;
                    } else {
                        masses[(int64_t{q} << 3) | 1] += 0.5 * w;  // |+/-> jump mass
                    }
                }
            }
            // diff against the previous active set (both sorted)
            size_t i = 0, j = 0;
            const auto& prev = prev_active[bi];
            while (i < prev.size() || j < cur.size()) {
                if (j == cur.size() || (i < prev.size() && prev[i] < cur[j])) {
                    auto it = open_since[bi].find(prev[i]);
                    active_.per_branch[bi][prev[i]].emplace_back(it->second, tick);
                    open_since[bi].erase(it);
                    ++i;
                } else if (i == prev.size() || cur[j] < prev[i]) {
                    open_since[bi][cur[j]] = tick;
                    ++j;
                } else {
                    ++i;
                    ++j;
                }
            }
            prev_active[bi] = cur;
        }
        std::vector<std::pair<int64_t, double>> tick_slots(masses.begin(), masses.end());
        std::sort(tick_slots.begin(), tick_slots.end());
        for (const auto& [key, mass] : tick_slots)
            damp_slots_.push_back(
                {tick, static_cast<int>(key >> 3), static_cast<int>(key & 7), mass});
    }
    for (size_t bi = 0; bi < nb; ++bi)
        for (const auto& [q, start] : open_since[bi])
            active_.per_branch[bi][q].emplace_back(start, ticks);

    // restoration + bus deviation
    report_.restored = true;
    for (const Branch& b : t) {
        for (int q = layout_.tree_begin; q < layout_.total; ++q)
            if (b.sym[q] != 0 || b.occ[q - layout_.tree_begin] != 0) report_.restored = false;
    }
    report_.max_bus_deviation = noiseless_deviation(1);
}

BranchTable BranchSim::table_after(int ticks) const {
    BranchTable t = initial_;
    for (int i = 0; i < ticks && i < program_.tick_count(); ++i) apply_step(t, program_.steps[i]);
    return t;
}

std::vector<std::pair<uint64_t, cplx>> BranchSim::noiseless_bus(int passes) const {
    BranchTable t = initial_;
    for (int pass = 0; pass < passes; ++pass)
        for (const TimeStep& step : program_.steps) apply_step(t, step);
    std::vector<std::pair<uint64_t, cplx>> out;
    for (const Branch& b : t) {
        uint64_t word = 0;
        for (int j = 0; j < layout_.k; ++j)
            word |= static_cast<uint64_t>(b.sym[layout_.data_bus(j)] & 1u) << j;
        out.emplace_back(bus_basis_index(layout_, b.high, b.address, word), b.coef);
    }
    return out;
}

double BranchSim::noiseless_deviation(int passes) const {
    BranchTable t = initial_;
    for (int pass = 0; pass < passes; ++pass)
        for (const TimeStep& step : program_.steps) apply_step(t, step);
    // any residue in the tree (or a +/- bus symbol) counts as full deviation
    std::unordered_map<uint64_t, cplx> actual;
    for (const Branch& b : t) {
        for (int q = layout_.tree_begin; q < layout_.total; ++q)
            if (b.sym[q] != 0 || b.occ[q - layout_.tree_begin] != 0) return 1.0;
        uint64_t word = 0;
        for (int j = 0; j < layout_.k; ++j) {
            const uint8_t s = b.sym[layout_.data_bus(j)];
            if (s >= 2) return 1.0;
            word |= static_cast<uint64_t>(s) << j;
        }
        actual[bus_basis_index(layout_, b.high, b.address, word)] += b.coef;
    }
    const bool xor_map = passes % 2 == 1;
    std::unordered_map<uint64_t, cplx> expect;
    for (const InputBranch& ib : input_.branches) {
        const uint64_t w = xor_map ? ib.word ^ memory_.word(ib.high, ib.address) : ib.word;
        expect[bus_basis_index(layout_, ib.high, ib.address, w)] += ib.amp;
    }
    double dev = 0.0;
    for (const auto& [k, v] : actual) {
        auto it = expect.find(k);
        dev = std::max(dev, std::abs(v - (it == expect.end() ? cplx{0.0, 0.0} : it->second)));
    }
    for (const auto& [k, v] : expect)
        if (actual.find(k) == actual.end()) dev = std::max(dev, std::abs(v));
    return dev;
}

double BranchSim::lambda_of(const std::vector<KrausOutcome>& events) const {
    const size_t nb = initial_.size();
    std::vector<char> good(nb, 1);
    for (const KrausOutcome& ev : events) {
        for (size_t bi = 0; bi < nb; ++bi) {
            if (!good[bi]) continue;
            const auto& per_q = active_.per_branch[bi];
            auto it = per_q.find(ev.target);
            if (it == per_q.end()) continue;
            for (const auto& [start, end] : it->second)
                if (ev.tick >= start && ev.tick < end) {
                    good[bi] = 0;
                    break;
                }
        }
    }
    double num = 0.0, den = 0.0;
    for (size_t bi = 0; bi < nb; ++bi) {
        const double w = std::norm(initial_[bi].alpha);
        den += w;
        if (good[bi]) num += w;
    }
    return den > 0.0 ? num / den : 0.0;
}

BranchSim::Outcome BranchSim::run_with_events(const std::vector<KrausOutcome>& events,
                                              const NoiseModel& model) const {
    BranchTable t = initial_;
    const int tree_q = layout_.tree_qudit_count();
    std::vector<double> pow_full(tree_q + 1, 1.0), pow_half(tree_q + 1, 1.0);
    if (model.gamma > 0.0) {
        const double sf = std::sqrt(1.0 - model.gamma);
        const double sh = std::sqrt(1.0 - model.gamma / 2.0);
        for (int i = 1; i <= tree_q; ++i) {
            pow_full[i] = pow_full[i - 1] * sf;
            pow_half[i] = pow_half[i - 1] * sh;
        }
    }

    size_t next = 0;
    for (int tick = 0; tick < program_.tick_count(); ++tick) {
        apply_step(t, program_.steps[tick]);
        const size_t first = next;
        while (next < events.size() && events[next].tick == tick) ++next;
        for (size_t e = first; e < next; ++e)
            if (events[e].channel == ChannelKind::Damping) apply_event(t, events[e]);
        if (model.gamma > 0.0)
            for (Branch& b : t)
                if (b.alive) b.coef *= pow_full[b.exc_full] * pow_half[b.exc_half];
        for (size_t e = first; e < next; ++e)
            if (events[e].channel == ChannelKind::Depolarizing) apply_event(t, events[e]);
    }
    Outcome out;
    const auto [overlap, n2] = overlap_of(t);
    out.fidelity = n2 > 0.0 ? overlap / n2 : 0.0;
    out.lambda = lambda_of(events);
    return out;
}

std::vector<KrausOutcome> BranchSim::sample_trajectory_events(const NoiseModel& model,
                                                              Rng& rng) const {
    std::vector<KrausOutcome> events;
    if (model.gamma > 0.0) {
        // thinning: skip at the flat rate, accept with the slot's mass (<= 1)
        const int64_t slots = static_cast<int64_t>(damp_slots_.size());
        int64_t pos = -1;
        for (;;) {
            pos += rng.geometric_skip(model.gamma);
            if (pos >= slots) break;
            const DampSlot& slot = damp_slots_[pos];
            if (rng.uniform() < slot.mass)
                events.push_back({ChannelKind::Damping, slot.level, slot.target, slot.tick});
        }
    }
    if (model.p > 0.0) {
        NoiseModel depol{0.0, model.p};
        const auto weyls = sample_error_events(layout_, program_.tick_count(), depol, rng);
        events.insert(events.end(), weyls.begin(), weyls.end());
    }
    std::sort(events.begin(), events.end(), [](const KrausOutcome& a, const KrausOutcome& b) {
        if (a.tick != b.tick) return a.tick < b.tick;
        if (a.target != b.target) return a.target < b.target;
        if (a.channel != b.channel) return static_cast<int>(a.channel) < static_cast<int>(b.channel);
        return a.index < b.index;
    });
    return events;
}

BranchSim::Outcome BranchSim::run_trajectory(const NoiseModel& model, Rng& rng) const {
    const auto events = sample_trajectory_events(model, rng);
    return run_with_events(events, model);
}

FidelityEstimate BranchSim::estimate_fidelity(const NoiseModel& model, int trajectories,
                                              uint64_t seed, int threads) const {
    if (trajectories < 1) throw std::invalid_argument("trajectories must be >= 1");
    model.check();
    std::vector<double> fids(trajectories), lambdas(trajectories);
    const int workers = std::max(1, threads);
    std::atomic<int> cursor{0};
    // most trajectories carry no events at the sweep rates; evaluate that
    // outcome once
    const Outcome quiet = run_with_events({}, model);
    auto work = [&]() {
        for (;;) {
            const int i = cursor.fetch_add(1);
            if (i >= trajectories) break;
            Rng rng = Rng::substream(seed, static_cast<uint64_t>(i));
            const auto events = sample_trajectory_events(model, rng);
            const Outcome o = events.empty() ? quiet : run_with_events(events, model);
            fids[i] = o.fidelity;
            lambdas[i] = o.lambda;
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();

    FidelityEstimate est;
    est.trajectories = trajectories;
    double mean = 0.0, lmean = 0.0;
    for (int i = 0; i < trajectories; ++i) {
        mean += fids[i];
        lmean += lambdas[i];
    }
    mean /= trajectories;
    lmean /= trajectories;
    double var = 0.0;
    for (double f : fids) var += (f - mean) * (f - mean);
    var = trajectories > 1 ? var / (trajectories - 1.0) : 0.0;
    est.mean = mean;
    est.stderr_ = std::sqrt(var / trajectories);
    est.lambda_mean = lmean;
    return est;
}

}  // namespace qram
