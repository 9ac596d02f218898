#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qram/branch_sim.hpp"
#include "qram/dense_sim.hpp"
#include "qram/protocols.hpp"

using namespace qram;

TEST_CASE("noiseless branch evolution matches the dense oracle exactly, n <= 2") {
    for (Scheme scheme : {Scheme::Qutrit, Scheme::Qubit})
        for (int n = 1; n <= 2; ++n)
            for (int k = 1; k <= 2; ++k)
                for (const char* proto : {"nonparallel", "parallel"}) {
                    TreeSpec spec{n, k, scheme, 1};
                    Program p = compile(proto, spec, 0);
                    Rng mr(13 * n + k);
                    MemoryTable mem = MemoryTable::random(spec, 0, mr);
                    DenseSim dense(p, mem);
                    QuditLayout layout(spec, 0);
                    for (uint64_t a = 0; a < (uint64_t{1} << n); ++a)
                        for (uint64_t z = 0; z < (uint64_t{1} << k); ++z) {
                            QueryInput in;
                            in.branches.push_back({0, a, z, {1.0, 0.0}});
                            BranchSim branch(p, mem, in);
                            CHECK(branch.noiseless_report().restored);
                            auto bus = branch.noiseless_bus(1);
                            REQUIRE(bus.size() == 1);
                            auto res = dense.run_noiseless(in);
                            CHECK(std::abs(res.bus[bus[0].first] - bus[0].second) < 1e-12);
                        }
                }
}

TEST_CASE("uniform input stays good with unit amplitude under no noise") {
    TreeSpec spec{3, 2, Scheme::Qutrit, 1};
    Program p = compile_parallel(spec);
    Rng mr(4);
    MemoryTable mem = MemoryTable::random(spec, 0, mr);
    QueryInput in = QueryInput::uniform_addresses(spec, 0);
    BranchSim sim(p, mem, in);
    CHECK(sim.noiseless_report().restored);
    CHECK(sim.noiseless_report().max_bus_deviation < 1e-12);
    auto out = sim.run_with_events({}, NoiseModel{0, 0});
    CHECK(out.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.lambda == 1.0);
}

TEST_CASE("parallel (4,3), address 1001: three data payloads at three distinct layers") {
    TreeSpec spec{4, 3, Scheme::Qutrit, 1};
    Program p = compile_parallel(spec);
    MemoryTable mem = MemoryTable::zeros(spec, 0);
    QueryInput in;
    in.branches.push_back({0, 0b1001, 0b111, {1.0, 0.0}});
    BranchSim sim(p, mem, in);
    QuditLayout layout(spec, 0);
    // tick 16 (1-based) holds DataCopy(0), Routing(1,Down) and DataBusInput(2,in):
    // afterwards digits 0,1,2 occupy layers 3, 2, 0 of the active path
    BranchTable t = sim.table_after(16);
    REQUIRE(t.size() == 1);
    const Branch& b = t[0];
    auto path = path_of(0b1001, spec);
    int occupied_layers = 0;
    for (int l : {0, 2, 3}) {
        const int q = layout.node_data(path[l], 0);
        if (b.occ[q - layout.tree_begin]) ++occupied_layers;
    }
    CHECK(occupied_layers == 3);
}

TEST_CASE("lambda: no events gives 1, one mid-fetch address hit gives 1/2") {
    TreeSpec spec{2, 1, Scheme::Qutrit, 1};
    Program p = compile_parallel(spec);
    Rng mr(8);
    MemoryTable mem = MemoryTable::random(spec, 0, mr);
    QueryInput in = QueryInput::uniform_addresses(spec, 0);
    BranchSim sim(p, mem, in);
    CHECK(sim.lambda_of({}) == doctest::Approx(1.0));

    QuditLayout layout(spec, 0);
    // X on the (1,0) address qutrit while it holds an address symbol
    // (mid-fetch tick): exactly the two 0x-addressed branches are bad
    const int target = layout.node_address({1, 0});
    const int tick = step_report(p).address_setting + 1;
    KrausOutcome ev{ChannelKind::Depolarizing, 3 /* X^1 Z^0 */, target, tick};
    CHECK(sim.lambda_of({ev}) == doctest::Approx(0.5));
}

TEST_CASE("an address hit mid-fetch caps fidelity near the surviving weight") {
    TreeSpec spec{2, 1, Scheme::Qutrit, 1};
    Program p = compile_parallel(spec);
    Rng mr(8);
    MemoryTable mem = MemoryTable::random(spec, 0, mr);
    QueryInput in = QueryInput::uniform_addresses(spec, 0);
    BranchSim sim(p, mem, in);
    DenseSim dense(p, mem);
    QuditLayout layout(spec, 0);
    const int tick = step_report(p).address_setting + 1;
    std::vector<KrausOutcome> events{
        {ChannelKind::Depolarizing, 3, layout.node_address({1, 0}), tick}};
    const NoiseModel model{0, 1e-3};
    auto out = sim.run_with_events(events, model);
    CHECK(out.fidelity <= 0.25 + 1e-9);
    // the dense oracle agrees on the exact value for the same configuration
    const double fd = dense.run_with_events(in, model, events);
    CHECK(out.fidelity == doctest::Approx(fd).epsilon(1e-9));
}

TEST_CASE("closure: every sampled operator maps tracked symbols to tracked symbols") {
    // exhaustive pass over the transition tables through the public API:
    // apply every possible single event to every reachable symbol placement
    TreeSpec spec{2, 2, Scheme::Qubit, 1};
    Program p = compile_parallel(spec);
    Rng mr(14);
    MemoryTable mem = MemoryTable::random(spec, 0, mr);
    QueryInput in = QueryInput::uniform_addresses(spec, 0);
    BranchSim sim(p, mem, in);
    QuditLayout layout(spec, 0);
    const int ticks = p.tick_count();
    for (int tick = 0; tick < ticks; tick += 2)
        for (int q = layout.tree_begin; q < layout.total; ++q) {
            const int d = layout.dim(q);
            for (int idx = 1; idx < d * d; ++idx) {
                auto out = sim.run_with_events(
                    {{ChannelKind::Depolarizing, idx, q, tick}}, NoiseModel{0, 1e-3});
                CHECK(out.fidelity >= 0.0);
                CHECK(out.fidelity <= 1.0 + 1e-12);
            }
            for (int lev = 1; lev < d; ++lev) {
                auto out = sim.run_with_events({{ChannelKind::Damping, lev, q, tick}},
                                               NoiseModel{1e-3, 0});
                CHECK(out.fidelity >= 0.0);
                CHECK(out.fidelity <= 1.0 + 1e-12);
            }
        }
}

TEST_CASE("single-event configurations agree with the dense oracle across schemes") {
    for (Scheme scheme : {Scheme::Qutrit, Scheme::Qubit}) {
        TreeSpec spec{2, 2, scheme, 1};
        Program p = compile_parallel(spec);
        Rng mr(3);
        MemoryTable mem = MemoryTable::random(spec, 0, mr);
        QueryInput in = QueryInput::uniform_addresses(spec, 0);
        BranchSim branch(p, mem, in);
        DenseSim dense(p, mem);
        QuditLayout layout(spec, 0);
        const NoiseModel model{1e-3, 1e-3};
        double worst = 0.0;
        for (int tick = 0; tick < p.tick_count(); tick += 3)
            for (int q = layout.tree_begin; q < layout.total; ++q) {
                const int d = layout.dim(q);
                for (int idx = 1; idx < d * d; ++idx) {
                    std::vector<KrausOutcome> ev{{ChannelKind::Depolarizing, idx, q, tick}};
                    worst = std::max(worst, std::abs(branch.run_with_events(ev, model).fidelity -
                                                     dense.run_with_events(in, model, ev)));
                }
                std::vector<KrausOutcome> ev{{ChannelKind::Damping, 1, q, tick}};
                worst = std::max(worst, std::abs(branch.run_with_events(ev, model).fidelity -
                                                 dense.run_with_events(in, model, ev)));
            }
        // the +/- alphabet drops an O(gamma) no-jump leak in the qubit scheme
        CHECK(worst < (scheme == Scheme::Qutrit ? 1e-12 : 5e-3));
    }
}

TEST_CASE("estimates match the dense backend within three combined errors") {
    TreeSpec spec{2, 1, Scheme::Qutrit, 1};
    Program p = compile_nonparallel(spec);
    Rng mr(6);
    MemoryTable mem = MemoryTable::random(spec, 0, mr);
    QueryInput in = QueryInput::uniform_addresses(spec, 0);
    BranchSim branch(p, mem, in);
    DenseSim dense(p, mem);
    const NoiseModel model{1e-3, 1e-3};
    auto eb = branch.estimate_fidelity(model, 4000, 2024, 2);
    auto ed = dense.estimate_fidelity(in, model, 4000, 2024, 2);
    const double band = 3 * std::sqrt(eb.stderr_ * eb.stderr_ + ed.stderr_ * ed.stderr_);
    CHECK(std::abs(eb.mean - ed.mean) < band);
}

TEST_CASE("estimates are deterministic under a fixed seed, any thread count") {
    TreeSpec spec{3, 2, Scheme::Qutrit, 1};
    Program p = compile_parallel(spec);
    Rng mr(6);
    MemoryTable mem = MemoryTable::random(spec, 0, mr);
    QueryInput in = QueryInput::uniform_addresses(spec, 0);
    BranchSim sim(p, mem, in);
    const NoiseModel model{1e-4, 1e-4};
    auto a = sim.estimate_fidelity(model, 500, 31, 1);
    auto b = sim.estimate_fidelity(model, 500, 31, 2);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    CHECK(a.lambda_mean == b.lambda_mean);
}

TEST_CASE("parallel beats nonparallel at (6,8) under matched noise") {
    TreeSpec spec{6, 8, Scheme::Qutrit, 1};
    Rng mr(77);
    MemoryTable mem = MemoryTable::random(spec, 0, mr);
    QueryInput in = QueryInput::uniform_addresses(spec, 0);
    const NoiseModel model{1e-4, 1e-4};
    BranchSim par(compile_parallel(spec), mem, in);
    BranchSim non(compile_nonparallel(spec), mem, in);
    auto ep = par.estimate_fidelity(model, 2000, 5, 2);
    auto en = non.estimate_fidelity(model, 2000, 5, 2);
    CHECK(ep.mean - en.mean > 3 * std::sqrt(ep.stderr_ * ep.stderr_ + en.stderr_ * en.stderr_));
}

TEST_CASE("error growth: superlinear in n, at most linear in k") {
    const NoiseModel model{1e-4, 1e-4};
    auto infidelity = [&](int n, int k) {
        TreeSpec spec{n, k, Scheme::Qutrit, 1};
        Rng mr(1000 + 17 * n + k);
        MemoryTable mem = MemoryTable::random(spec, 0, mr);
        QueryInput in = QueryInput::uniform_addresses(spec, 0);
        BranchSim sim(compile_parallel(spec), mem, in);
        return 1.0 - sim.estimate_fidelity(model, 3000, 9, 2).mean;
    };
    // doubling n more than doubles 1-F at fixed k
    const double n3 = infidelity(3, 3), n6 = infidelity(6, 3);
    CHECK(n6 > 2.0 * n3);
    // doubling k at fixed n grows 1-F by at most ~2x (linear in k, plus the
    // n^2 floor); allow slack for Monte-Carlo noise
    const double k3 = infidelity(6, 3), k6 = infidelity(6, 6);
    CHECK(k6 < 2.0 * k3 * 1.25);
}

TEST_CASE("lambda mean tracks the good-branch bound at small rates") {
    TreeSpec spec{4, 2, Scheme::Qutrit, 1};
    Program p = compile_parallel(spec);
    Rng mr(2);
    MemoryTable mem = MemoryTable::random(spec, 0, mr);
    QueryInput in = QueryInput::uniform_addresses(spec, 0);
    BranchSim sim(p, mem, in);
    const double eps = 1e-4;
    auto est = sim.estimate_fidelity(NoiseModel{0.0, eps}, 4000, 3, 2);
    const double bound = 1.0 - eps * p.tick_count() * spec.n;
    CHECK(est.lambda_mean >= bound - 3 * 0.01);
}
