#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qram/dense_sim.hpp"
#include "qram/protocols.hpp"

using namespace qram;

TEST_CASE("XOR erasure: feeding back the stored word clears the bus") {
    TreeSpec spec{2, 2, Scheme::Qutrit, 1};
    Program p = compile_parallel(spec);
    Rng mr(5);
    MemoryTable mem = MemoryTable::random(spec, 0, mr);
    DenseSim sim(p, mem);
    QuditLayout layout(spec, 0);
    for (uint64_t a = 0; a < 4; ++a) {
        QueryInput in;
        in.branches.push_back({0, a, mem.words[a], {1.0, 0.0}});
        auto res = sim.run_noiseless(in);
        const uint64_t want = bus_basis_index(layout, 0, a, 0);
        CHECK(std::abs(res.bus[want] - cplx{1, 0}) < 1e-12);
        CHECK(res.restoration_dev < 1e-12);
        CHECK(res.norm_dev < 1e-10);
    }
}

TEST_CASE("hybrid (1,1) m=1 maps all four basis addresses") {
    TreeSpec spec{1, 1, Scheme::Qutrit, 1};
    Program p = compile_hybrid_parallel(spec, 1);
    Rng mr(9);
    MemoryTable mem = MemoryTable::random(spec, 1, mr);
    DenseSim sim(p, mem);
    QuditLayout layout = p.layout();
    for (uint64_t v = 0; v < 4; ++v) {
        const uint64_t high = v >> 1, low = v & 1;
        QueryInput in;
        in.branches.push_back({high, low, 0, {1.0, 0.0}});
        auto res = sim.run_noiseless(in);
        const uint64_t want = bus_basis_index(layout, high, low, mem.word(high, low));
        CHECK(std::abs(res.bus[want] - cplx{1, 0}) < 1e-12);
        CHECK(res.restoration_dev < 1e-12);
    }
}

TEST_CASE("silent trajectory equals the noiseless run with weight 1") {
    TreeSpec spec{2, 1, Scheme::Qubit, 1};
    Program p = compile_parallel(spec);
    Rng mr(2);
    MemoryTable mem = MemoryTable::random(spec, 0, mr);
    DenseSim sim(p, mem);
    QueryInput in = QueryInput::uniform_addresses(spec, 0);
    Rng rng(1);
    auto traj = sim.run_trajectory(in, NoiseModel{0, 0}, rng);
    CHECK(traj.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(traj.weight == doctest::Approx(1.0));
    CHECK(traj.events.empty());
}

TEST_CASE("trajectories are reproducible under a fixed seed") {
    TreeSpec spec{2, 1, Scheme::Qutrit, 1};
    Program p = compile_parallel(spec);
    Rng mr(2);
    MemoryTable mem = MemoryTable::random(spec, 0, mr);
    DenseSim sim(p, mem);
    QueryInput in = QueryInput::uniform_addresses(spec, 0);
    NoiseModel model{1e-2, 1e-2};
    Rng r1(77), r2(77);
    auto a = sim.run_trajectory(in, model, r1);
    auto b = sim.run_trajectory(in, model, r2);
    CHECK(a.fidelity == b.fidelity);
    CHECK(a.weight == b.weight);
    CHECK(a.events.size() == b.events.size());
}

TEST_CASE("fidelity is monotone nonincreasing in the depolarizing rate") {
    TreeSpec spec{1, 1, Scheme::Qutrit, 1};
    Program p = compile_parallel(spec);
    Rng mr(3);
    MemoryTable mem = MemoryTable::random(spec, 0, mr);
    DenseSim sim(p, mem);
    QueryInput in = QueryInput::uniform_addresses(spec, 0);
    double prev = 1.1;
    for (double rate : {0.0, 1e-3, 1e-2, 1e-1}) {
        auto est = sim.estimate_fidelity(in, NoiseModel{0.0, rate}, 4000, 11, 2);
        CHECK(est.mean < prev + 3 * est.stderr_ + 1e-12);
        prev = est.mean;
    }
}

TEST_CASE("amplitude cap refuses oversized instances") {
    TreeSpec spec{8, 8, Scheme::Qutrit, 1};
    Program p = compile_parallel(spec);
    MemoryTable mem = MemoryTable::zeros(spec, 0);
    CHECK_THROWS_AS(DenseSim(p, mem), ResourceError);
}

namespace {

// Density-matrix oracle for the single-node instance: rho evolves through the
// program unitaries (via DenseSim on columns) and the exact per-qudit Kraus
// sums. Independent of the trajectory machinery it checks.
struct DensityOracle {
    Program program;
    MemoryTable memory;
    QuditLayout layout;
    int64_t dim;
    std::vector<int> dims, strides;
    std::vector<std::vector<cplx>> rho;  // rho[c][r]

    DensityOracle(const Program& p, const MemoryTable& mem)
        : program(p), memory(mem), layout(p.layout()) {
        DenseSim probe(p, mem);
        dim = probe.dimension();
        dims.resize(layout.total);
        strides.resize(layout.total);
        int64_t s = 1;
        for (int q = 0; q < layout.total; ++q) {
            dims[q] = layout.dim(q);
            strides[q] = static_cast<int>(s);
            s *= dims[q];
        }
    }

    void init(const QueryInput& in) {
        std::vector<cplx> psi(dim, cplx{0, 0});
        for (const auto& b : in.branches)
            psi[bus_basis_index(layout, b.high, b.address, b.word)] += b.amp;
        rho.assign(dim, std::vector<cplx>(dim, cplx{0, 0}));
        for (int64_t r = 0; r < dim; ++r)
            for (int64_t c = 0; c < dim; ++c) rho[c][r] = psi[r] * std::conj(psi[c]);
    }

    void conj_transpose() {
        for (int64_t r = 0; r < dim; ++r)
            for (int64_t c = r; c < dim; ++c) {
                cplx t = rho[c][r];
                rho[c][r] = std::conj(rho[r][c]);
                rho[r][c] = std::conj(t);
            }
    }

    // rho <- U rho U^dag with U one program step
    void step(const TimeStep& ts) {
        DenseSim sim(program, memory);
        auto apply_cols = [&]() {
            for (int64_t c = 0; c < dim; ++c) {
                sim.set_raw(rho[c]);
                sim.apply_step(ts);
                rho[c] = sim.raw();
            }
        };
        apply_cols();
        conj_transpose();
        apply_cols();
        conj_transpose();
    }

    void apply_mat(std::vector<cplx>& v, int q, const Cmat& mat) const {
        const int d = dims[q], s = strides[q];
        for (int64_t base = 0; base < dim; ++base) {
            if (static_cast<int>(base / s) % d != 0) continue;
            cplx tmp[3] = {};
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) tmp[r] += mat.at(r, c) * v[base + c * s];
            for (int r = 0; r < d; ++r) v[base + r * s] = tmp[r];
        }
    }

    // rho <- sum_K (sqrt(prob_K) K) rho (...)^dag on one qudit
    void channel(int q, const std::vector<Cmat>& ks, const std::vector<double>& probs) {
        std::vector<std::vector<cplx>> acc(dim, std::vector<cplx>(dim, cplx{0, 0}));
        for (size_t ki = 0; ki < ks.size(); ++ki) {
            auto save = rho;
            for (int64_t c = 0; c < dim; ++c) apply_mat(rho[c], q, ks[ki]);
            conj_transpose();
            for (int64_t c = 0; c < dim; ++c) apply_mat(rho[c], q, ks[ki]);
            conj_transpose();
            for (int64_t c = 0; c < dim; ++c)
                for (int64_t r = 0; r < dim; ++r) acc[c][r] += probs[ki] * rho[c][r];
            rho = std::move(save);
        }
        rho = std::move(acc);
    }

    void run(const QueryInput& in, const NoiseModel& model) {
        init(in);
        for (const TimeStep& ts : program.steps) {
            step(ts);
            for (int q = layout.tree_begin; q < layout.total; ++q) {
                if (model.gamma > 0.0) {
                    auto ks = damping_kraus(dims[q], model.gamma);
                    channel(q, ks, std::vector<double>(ks.size(), 1.0));
                }
                if (model.p > 0.0) {
                    std::vector<Cmat> ws{Cmat::identity(dims[q])};
                    std::vector<double> probs{1.0 - model.p};
                    for (const auto& w : depolarizing_unraveling(dims[q], model.p)) {
                        ws.push_back(weyl_matrix(dims[q], w.a, w.b));
                        probs.push_back(w.prob);
                    }
                    channel(q, ws, probs);
                }
            }
        }
    }
};

}  // namespace

TEST_CASE("trajectory ensemble reproduces the density-matrix evolution on one node") {
    TreeSpec spec{1, 1, Scheme::Qutrit, 1};
    Program p = compile_parallel(spec);
    MemoryTable mem = MemoryTable::zeros(spec, 0);
    mem.words = {1, 0};
    QueryInput in = QueryInput::uniform_addresses(spec, 0);
    const NoiseModel model{0.02, 0.5};

    DensityOracle oracle(p, mem);
    oracle.run(in, model);

    DenseSim sim(p, mem);
    const int64_t dim = oracle.dim;
    std::vector<std::vector<cplx>> mc(dim, std::vector<cplx>(dim, cplx{0, 0}));
    const int samples = 100000;
    for (int s = 0; s < samples; ++s) {
        Rng rng = Rng::substream(4242, s);
        sim.run_trajectory(in, model, rng);
        const auto& psi = sim.raw();
        for (int64_t r = 0; r < dim; ++r)
            for (int64_t c = 0; c < dim; ++c) mc[c][r] += psi[r] * std::conj(psi[c]);
    }
    double max_err = 0.0;
    for (int64_t r = 0; r < dim; ++r)
        for (int64_t c = 0; c < dim; ++c)
            max_err = std::max(max_err,
                               std::abs(mc[c][r] / double(samples) - oracle.rho[c][r]));
    CHECK(max_err < 1e-3 * 3);
}
