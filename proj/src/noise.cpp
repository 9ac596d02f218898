#include "qram/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qram {

void NoiseModel::check() const {
    if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must be in [0,1]");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0,1]");
}

Cmat Cmat::identity(int d) {
    Cmat m = zero(d);
    for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
    return m;
}

Cmat Cmat::dagger() const {
    Cmat m = zero(dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m.at(c, r) = std::conj(at(r, c));
    return m;
}

Cmat Cmat::mul(const Cmat& o) const {
    Cmat m = zero(dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) {
            std::complex<double> s = 0.0;
            for (int t = 0; t < dim; ++t) s += at(r, t) * o.at(t, c);
            m.at(r, c) = s;
        }
    return m;
}

std::vector<Cmat> damping_kraus(int dim, double gamma) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("damping_kraus: dim must be 2 or 3");
    const double s = std::sqrt(1.0 - gamma);
    const double r = std::sqrt(gamma);
    std::vector<Cmat> ks;
    Cmat k0 = Cmat::zero(dim);
    k0.at(0, 0) = 1.0;
    for (int lev = 1; lev < dim; ++lev) k0.at(lev, lev) = s;
    ks.push_back(std::move(k0));
    for (int lev = 1; lev < dim; ++lev) {
        Cmat kj = Cmat::zero(dim);
        kj.at(0, lev) = r;
        ks.push_back(std::move(kj));
    }
    return ks;
}

Cmat weyl_matrix(int dim, int a, int b) {
    Cmat m = Cmat::zero(dim);
    const double w = 2.0 * M_PI / dim;
    for (int j = 0; j < dim; ++j) {
        const std::complex<double> phase{std::cos(w * b * j), std::sin(w * b * j)};
        m.at((j + a) % dim, j) = phase;
    }
    return m;
}

std::vector<WeylProb> depolarizing_unraveling(int dim, double p) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("depolarizing: dim must be 2 or 3");
    std::vector<WeylProb> out;
    const int count = dim * dim - 1;
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            if (a == 0 && b == 0) continue;
            out.push_back({a, b, p / count});
        }
    return out;
}

std::vector<KrausOutcome> sample_error_events(const QuditLayout& layout, int ticks,
                                              const NoiseModel& model, Rng& rng) {
    model.check();
    std::vector<KrausOutcome> events;
    const int64_t qudits = layout.tree_qudit_count();

    // Damping jump candidates: one Bernoulli(gamma) slot per jump operator.
    // The slot grid is (tick, qudit, level-1); qutrits contribute two slots.
    if (model.gamma > 0.0) {
        std::vector<int> slot_qudit, slot_index;
        for (int64_t i = 0; i < qudits; ++i) {
            const int q = layout.tree_begin + static_cast<int>(i);
            for (int lev = 1; lev < layout.dim(q); ++lev) {
                slot_qudit.push_back(q);
                slot_index.push_back(lev);
            }
        }
        const int64_t per_tick = static_cast<int64_t>(slot_qudit.size());
        const int64_t grid = per_tick * ticks;
        int64_t pos = -1;
        for (;;) {
            pos += rng.geometric_skip(model.gamma);
            if (pos >= grid) break;
            const int tick = static_cast<int>(pos / per_tick);
            const int64_t slot = pos % per_tick;
            events.push_back({ChannelKind::Damping, slot_index[slot], slot_qudit[slot], tick});
        }
    }

    if (model.p > 0.0) {
        const int64_t grid = qudits * ticks;
        int64_t pos = -1;
        for (;;) {
            pos += rng.geometric_skip(model.p);
            if (pos >= grid) break;
            const int tick = static_cast<int>(pos / qudits);
            const int q = layout.tree_begin + static_cast<int>(pos % qudits);
            const int d = layout.dim(q);
            const int index = 1 + static_cast<int>(rng.uniform_int(d * d - 1));
            events.push_back({ChannelKind::Depolarizing, index, q, tick});
        }
    }

    std::sort(events.begin(), events.end(), [](const KrausOutcome& a, const KrausOutcome& b) {
        if (a.tick != b.tick) return a.tick < b.tick;
        if (a.target != b.target) return a.target < b.target;
        if (a.channel != b.channel) return static_cast<int>(a.channel) < static_cast<int>(b.channel);
        return a.index < b.index;
    });
    return events;
}

std::vector<KrausOutcome> sample_error_events(const Program& program, const NoiseModel& model,
                                              Rng& rng) {
    return sample_error_events(program.layout(), program.tick_count(), model, rng);
}

}  // namespace qram
