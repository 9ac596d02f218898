#include "qram/dense_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>

namespace qram {

uint64_t bus_basis_index(const QuditLayout& layout, uint64_t high, uint64_t address,
                         uint64_t word) {
    uint64_t idx = 0;
    for (int i = 0; i < layout.n; ++i)
        idx |= static_cast<uint64_t>(address_bit(address, layout.n, i)) << i;
    idx |= (word & ((uint64_t{1} << layout.k) - 1)) << layout.n;
    idx |= (high & ((uint64_t{1} << layout.m) - 1)) << (layout.n + layout.k);
    return idx;
}

std::vector<cplx> ideal_bus_vector(const QueryInput& input, const MemoryTable* memory,
                                   const QuditLayout& layout) {
    std::vector<cplx> ideal(uint64_t{1} << (layout.n + layout.k + layout.m), cplx{0.0, 0.0});
    for (const InputBranch& b : input.branches) {
        const uint64_t w = memory ? (b.word ^ memory->word(b.high, b.address)) : b.word;
        ideal[bus_basis_index(layout, b.high, b.address, w)] += b.amp;
    }
    return ideal;
}

DenseSim::DenseSim(const Program& program, const MemoryTable& memory)
    : program_(program), memory_(memory), layout_(program.layout()) {
    if (memory.n != program.spec.n || memory.m != program.m || memory.k < program.spec.k)
        throw std::invalid_argument("memory table does not match the program instance");
    dims_.resize(layout_.total);
    strides_.resize(layout_.total);
    int64_t stride = 1;
    for (int q = 0; q < layout_.total; ++q) {
        dims_[q] = layout_.dim(q);
        strides_[q] = stride;
        if (stride > kMaxAmplitudes) throw ResourceError("dense state exceeds the amplitude cap");
        stride *= dims_[q];
    }
    if (stride > kMaxAmplitudes) throw ResourceError("dense state exceeds the amplitude cap");
    dim_ = stride;
    bus_dim_ = uint64_t{1} << layout_.tree_begin;
}

void DenseSim::set_raw(std::vector<cplx> amps) {
    if (static_cast<int64_t>(amps.size()) != dim_)
        throw std::invalid_argument("raw state has the wrong dimension");
    state_ = std::move(amps);
}

void DenseSim::reset(const QueryInput& input) {
    state_.assign(dim_, cplx{0.0, 0.0});
    for (const InputBranch& b : input.branches)
        state_[bus_basis_index(layout_, b.high, b.address, b.word)] += b.amp;
    ideal_ = ideal_bus_vector(input, &memory_, layout_);
    norm_dev_ = 0.0;
}

template <typename F>
void DenseSim::for_each_base(const std::vector<int>& qudits, F&& f) const {
    // Enumerate every index whose digits at `qudits` (sorted ascending) are
    // all zero; op loops then offset into the digit combinations they need.
    int64_t parts[32];
    int64_t counts[32];
    const int nq = static_cast<int>(qudits.size());
    int64_t prev = 1;
    for (int i = 0; i < nq; ++i) {
        parts[i] = prev;
        counts[i] = strides_[qudits[i]] / prev;
        prev = strides_[qudits[i]] * dims_[qudits[i]];
    }
    parts[nq] = prev;
    counts[nq] = dim_ / prev;

    int64_t iter[33] = {0};
    for (;;) {
        int64_t base = 0;
        for (int i = 0; i <= nq; ++i) base += iter[i] * parts[i];
        f(base);
        int level = 0;
        for (; level <= nq; ++level) {
            if (++iter[level] < counts[level]) break;
            iter[level] = 0;
        }
        if (level > nq) break;
    }
}

void DenseSim::apply_cnot(int control, int target) {
    const int64_t sc = strides_[control], st = strides_[target];
    for_each_base({std::min(control, target), std::max(control, target)}, [&](int64_t base) {
        std::swap(state_[base + sc], state_[base + sc + st]);
    });
}

void DenseSim::apply_swap(int q1, int q2) {
    const int64_t s1 = strides_[q1], s2 = strides_[q2];
    for_each_base({std::min(q1, q2), std::max(q1, q2)}, [&](int64_t base) {
        std::swap(state_[base + s1], state_[base + s2]);
    });
}

void DenseSim::apply_cswap_high(uint64_t high_value, int q1, int q2) {
    std::vector<int> qs;
    for (int i = 0; i < layout_.m; ++i) qs.push_back(layout_.high_wire(i));
    qs.push_back(q1);
    qs.push_back(q2);
    std::sort(qs.begin(), qs.end());
    int64_t off = 0;
    for (int i = 0; i < layout_.m; ++i)
        if ((high_value >> i) & 1u) off += strides_[layout_.high_wire(i)];
    const int64_t s1 = strides_[q1], s2 = strides_[q2];
    for_each_base(qs, [&](int64_t base) {
        std::swap(state_[base + off + s1], state_[base + off + s2]);
    });
}

void DenseSim::apply_h(int q) {
    const int64_t s = strides_[q];
    const double inv = 1.0 / std::sqrt(2.0);
    for_each_base({q}, [&](int64_t base) {
        const cplx a0 = state_[base];
        const cplx a1 = state_[base + s];
        state_[base] = (a0 + a1) * inv;
        state_[base + s] = (a0 - a1) * inv;
    });
}

void DenseSim::apply_routing(const LayeredOp& op) {
    const int l = op.index;
    const bool qutrit = layout_.scheme == Scheme::Qutrit;
    for (int p = 0; p < (1 << l); ++p) {
        const NodeId x{l, p};
        const int aq = layout_.node_address(x);
        for (int bank = 0; bank < layout_.c; ++bank) {
            const int dp = layout_.node_data(x, bank);
            // left swap on a = L, right swap on a = R (L=0/R=1 in the qubit scheme)
            for (int side = 0; side < 2; ++side) {
                const int dc = layout_.node_data(side == 0 ? x.left() : x.right(), bank);
                const int64_t sa = strides_[aq], sp = strides_[dp], sc = strides_[dc];
                const int64_t alev = (qutrit ? side + 1 : side) * sa;
                std::vector<int> qs{aq, dp, dc};
                std::sort(qs.begin(), qs.end());
                for_each_base(qs, [&](int64_t base) {
                    std::swap(state_[base + alev + sp], state_[base + alev + sc]);
                });
            }
        }
    }
}

void DenseSim::apply_internal_swap(const LayeredOp& op) {
    const int l = op.index;
    if (layout_.scheme == Scheme::Qubit) {
        for (int p = 0; p < (1 << l); ++p)
            apply_swap(layout_.node_address({l, p}), layout_.node_data({l, p}, 0));
        return;
    }
    if (l == 0) {
        const int ac = layout_.node_address({0, 0});
        const int dc = layout_.node_data({0, 0}, 0);
        const int64_t sa = strides_[ac], sd = strides_[dc];
        std::vector<int> qs{ac, dc};
        std::sort(qs.begin(), qs.end());
        for_each_base(qs, [&](int64_t base) {
            std::swap(state_[base], state_[base + sa]);               // W0 <-> L0
            std::swap(state_[base + sd], state_[base + 2 * sa]);      // W1 <-> R0
        });
        return;
    }
    for (int p = 0; p < (1 << (l - 1)); ++p) {
        const NodeId parent{l - 1, p};
        const int ap = layout_.node_address(parent);
        for (int side = 0; side < 2; ++side) {
            const NodeId child = side == 0 ? parent.left() : parent.right();
            const int ac = layout_.node_address(child);
            const int dc = layout_.node_data(child, 0);
            const int64_t off = (side + 1) * strides_[ap];  // parent at L / R
            const int64_t sa = strides_[ac], sd = strides_[dc];
            std::vector<int> qs{ap, ac, dc};
            std::sort(qs.begin(), qs.end());
            for_each_base(qs, [&](int64_t base) {
                std::swap(state_[base + off], state_[base + off + sa]);
                std::swap(state_[base + off + sd], state_[base + off + 2 * sa]);
            });
        }
    }
}

void DenseSim::apply_data_copy(const LayeredOp& op) {
    const int leaf_layer = layout_.n - 1;
    const bool qutrit = layout_.scheme == Scheme::Qutrit;
    const bool phase_style = program_.phase_encoded_copy();
    for (int p = 0; p < (1 << leaf_layer); ++p) {
        const NodeId x{leaf_layer, p};
        const int aq = layout_.node_address(x);
        for (int b = 0; b < layout_.c; ++b) {
            const int digit = op.index + b;
            const int dq = layout_.node_data(x, b);
            const int bit_left = memory_.bit(op.high, 2 * p, digit);
            const int bit_right = memory_.bit(op.high, 2 * p + 1, digit);
            if (!bit_left && !bit_right) continue;
            const int64_t sa = strides_[aq], sd = strides_[dq];
            std::vector<int> qs{aq, dq};
            std::sort(qs.begin(), qs.end());
            // address level selecting the left / right cell
            const int64_t lev_left = (qutrit ? 1 : 0) * sa;
            const int64_t lev_right = (qutrit ? 2 : 1) * sa;
            if (phase_style) {
                for_each_base(qs, [&](int64_t base) {
                    if (bit_left) state_[base + lev_left + sd] = -state_[base + lev_left + sd];
                    if (bit_right) state_[base + lev_right + sd] = -state_[base + lev_right + sd];
                });
            } else {
                for_each_base(qs, [&](int64_t base) {
                    if (bit_left) std::swap(state_[base + lev_left], state_[base + lev_left + sd]);
                    if (bit_right)
                        std::swap(state_[base + lev_right], state_[base + lev_right + sd]);
                });
            }
        }
    }
}

void DenseSim::apply_op(const LayeredOp& op) {
    switch (op.type) {
        case OpType::AddressBusInput:
            apply_cnot(layout_.address_bus(op.index), layout_.node_data({0, 0}, 0));
            break;
        case OpType::DataBusInput: {
            const int bus = layout_.data_bus(op.index);
            const int root = layout_.node_data({0, 0}, op.index % layout_.c);
            const bool h = program_.spec.scheme == Scheme::Qubit;
            if (h && op.bus_dir == BusDir::In) apply_h(bus);
            apply_swap(bus, root);
            if (h && op.bus_dir == BusDir::Out) apply_h(bus);
            break;
        }
        case OpType::ControlledDataBusInput: {
            const int bus = layout_.data_bus(op.index);
            const int root = layout_.node_data({0, 0}, 0);
            // hybrid payloads are phase-encoded in both schemes
            if (op.bus_dir == BusDir::In) {
                apply_h(bus);
                apply_cswap_high(op.high, bus, root);
            } else {
                apply_cswap_high(op.high, bus, root);
                apply_h(bus);
            }
            break;
        }
        case OpType::Routing:
            apply_routing(op);
            break;
        case OpType::InternalSwap:
            apply_internal_swap(op);
            break;
        case OpType::DataCopy:
            apply_data_copy(op);
            break;
    }
}

void DenseSim::apply_step(const TimeStep& step) {
    for (const LayeredOp& op : step.ops) apply_op(op);
}

void DenseSim::apply_program() {
    for (const TimeStep& step : program_.steps) {
        apply_step(step);
        norm_dev_ = std::max(norm_dev_, std::abs(norm2() - 1.0));
    }
}

double DenseSim::norm2() const {
    double s = 0.0;
    for (const cplx& a : state_) s += std::norm(a);
    return s;
}

void DenseSim::scale(double f) {
    for (cplx& a : state_) a *= f;
}

std::vector<cplx> DenseSim::bus_amplitudes() const {
    return std::vector<cplx>(state_.begin(), state_.begin() + static_cast<int64_t>(bus_dim_));
}

double DenseSim::tree_leak() const {
    double s = 0.0;
    for (int64_t i = static_cast<int64_t>(bus_dim_); i < dim_; ++i) s += std::norm(state_[i]);
    return s;
}

DenseSim::NoiselessResult DenseSim::run_noiseless(const QueryInput& input) {
    reset(input);
    apply_program();
    NoiselessResult r;
    r.bus = bus_amplitudes();
    r.restoration_dev = tree_leak();
    r.norm_dev = norm_dev_;
    return r;
}

void DenseSim::apply_weyl(int q, int a, int b) {
    const int d = dims_[q];
    const int64_t s = strides_[q];
    const double w = 2.0 * M_PI / d;
    cplx phase[3];
    for (int j = 0; j < d; ++j) phase[j] = cplx{std::cos(w * b * j), std::sin(w * b * j)};
    for_each_base({q}, [&](int64_t base) {
        cplx tmp[3];
        for (int j = 0; j < d; ++j) tmp[(j + a) % d] = state_[base + j * s] * phase[j];
        for (int j = 0; j < d; ++j) state_[base + j * s] = tmp[j];
    });
}

void DenseSim::level_masses(int q, double* out) const {
    const int d = dims_[q];
    const int64_t s = strides_[q];
    for (int j = 0; j < d; ++j) out[j] = 0.0;
    for_each_base({q}, [&](int64_t base) {
        for (int j = 0; j < d; ++j) out[j] += std::norm(state_[base + j * s]);
    });
}

void DenseSim::apply_jump(int q, int level, double scale) {
    const int d = dims_[q];
    const int64_t s = strides_[q];
    for_each_base({q}, [&](int64_t base) {
        const cplx v = state_[base + level * s] * scale;
        for (int j = 0; j < d; ++j) state_[base + j * s] = cplx{0.0, 0.0};
        state_[base] = v;
    });
}

void DenseSim::apply_no_jump(int q, double s_factor, double scale) {
    const int d = dims_[q];
    const int64_t s = strides_[q];
    const double excited = s_factor * scale;
    for_each_base({q}, [&](int64_t base) {
        state_[base] *= scale;
        for (int j = 1; j < d; ++j) state_[base + j * s] *= excited;
    });
}

double DenseSim::fidelity_against_ideal() const {
    // F = sum over tree configs t of |<ideal (x) t | psi>|^2, normalized.
    double f = 0.0;
    const int64_t tree_configs = dim_ / static_cast<int64_t>(bus_dim_);
    for (int64_t t = 0; t < tree_configs; ++t) {
        cplx acc{0.0, 0.0};
        const int64_t off = t * static_cast<int64_t>(bus_dim_);
        for (uint64_t b = 0; b < bus_dim_; ++b) acc += std::conj(ideal_[b]) * state_[off + b];
        f += std::norm(acc);
    }
    const double n2 = norm2();
    return n2 > 0.0 ? f / n2 : 0.0;
}

DenseSim::TrajectoryResult DenseSim::run_trajectory(const QueryInput& input,
                                                    const NoiseModel& model, Rng& rng) {
    model.check();
    reset(input);
    TrajectoryResult out;
    double masses[3];
    const double s_factor = std::sqrt(1.0 - model.gamma);
    for (int t = 0; t < program_.tick_count(); ++t) {
        apply_step(program_.steps[t]);
        for (int q = layout_.tree_begin; q < layout_.total; ++q) {
            if (model.gamma > 0.0) {
                const int d = dims_[q];
                level_masses(q, masses);
                double total = masses[0];
                for (int j = 1; j < d; ++j) total += masses[j];
                double u = rng.uniform() * total;
                int jumped = 0;
                for (int j = 1; j < d; ++j) {
                    const double pj = model.gamma * masses[j];
                    if (u < pj) {
                        apply_jump(q, j, 1.0 / std::sqrt(masses[j]));
                        out.weight *= pj / total;
                        out.events.push_back({ChannelKind::Damping, j, q, t});
                        jumped = 1;
                        break;
                    }
                    u -= pj;
                }
                if (!jumped) {
                    double p_no = total;
                    for (int j = 1; j < d; ++j) p_no -= model.gamma * masses[j];
                    apply_no_jump(q, s_factor, std::sqrt(total / p_no));
                    out.weight *= p_no / total;
                }
            }
            if (model.p > 0.0) {
                if (rng.uniform() < model.p) {
                    const int d = dims_[q];
                    const int index = 1 + static_cast<int>(rng.uniform_int(d * d - 1));
                    apply_weyl(q, index / d, index % d);
                    out.weight *= model.p / (d * d - 1);
                    out.events.push_back({ChannelKind::Depolarizing, index, q, t});
                } else {
                    out.weight *= 1.0 - model.p;
                }
            }
        }
    }
    out.fidelity = fidelity_against_ideal();
    return out;
}

double DenseSim::run_with_events(const QueryInput& input, const NoiseModel& model,
                                 const std::vector<KrausOutcome>& events) {
    model.check();
    reset(input);
    const double s_factor = std::sqrt(1.0 - model.gamma);
    size_t next = 0;
    for (int t = 0; t < program_.tick_count(); ++t) {
        apply_step(program_.steps[t]);
        const size_t first = next;
        while (next < events.size() && events[next].tick == t) ++next;
        for (size_t e = first; e < next; ++e)
            if (events[e].channel == ChannelKind::Damping)
                apply_jump(events[e].target, events[e].index);
        if (model.gamma > 0.0)
            for (int q = layout_.tree_begin; q < layout_.total; ++q) apply_no_jump(q, s_factor);
        for (size_t e = first; e < next; ++e)
            if (events[e].channel == ChannelKind::Depolarizing)
                apply_weyl(events[e].target, events[e].index / dims_[events[e].target],
                           events[e].index % dims_[events[e].target]);
    }
    return fidelity_against_ideal();
}

FidelityEstimate DenseSim::estimate_fidelity(const QueryInput& input, const NoiseModel& model,
                                             int trajectories, uint64_t seed, int threads) const {
    if (trajectories < 1) throw std::invalid_argument("trajectories must be >= 1");
    std::vector<double> fids(trajectories);
    const int workers = std::max(1, threads);
    std::vector<std::thread> pool;
    std::atomic<int> cursor{0};
    auto work = [&]() {
        DenseSim sim(program_, memory_);
        for (;;) {
            const int i = cursor.fetch_add(1);
            if (i >= trajectories) break;
            Rng rng = Rng::substream(seed, static_cast<uint64_t>(i));
            fids[i] = sim.run_trajectory(input, model, rng).fidelity;
        }
    };
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();

    FidelityEstimate est;
    est.trajectories = trajectories;
    double mean = 0.0;
    for (double f : fids) mean += f;
    mean /= trajectories;
    double var = 0.0;
    for (double f : fids) var += (f - mean) * (f - mean);
    var = trajectories > 1 ? var / (trajectories - 1.0) : 0.0;
    est.mean = mean;
    est.stderr_ = std::sqrt(var / trajectories);
    est.lambda_mean = std::numeric_limits<double>::quiet_NaN();
    return est;
}

std::string DenseSim::state_to_json(double cutoff) const {
    std::string out = "[";
    char buf[96];
    bool first = true;
    for (int64_t i = 0; i < dim_; ++i) {
        if (std::norm(state_[i]) < cutoff * cutoff) continue;
        std::snprintf(buf, sizeof(buf), "%s[%lld,%.17g,%.17g]", first ? "" : ",",
                      static_cast<long long>(i), state_[i].real(), state_[i].imag());
        out += buf;
        first = false;
    }
    out += "]";
    return out;
}

}  // namespace qram
