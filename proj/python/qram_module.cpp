#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qram/branch_sim.hpp"
#include "qram/experiment.hpp"
#include "qram/metrics.hpp"
#include "qram/protocols.hpp"

namespace py = pybind11;
using namespace qram;

namespace {

TreeSpec make_spec(int n, int k, const std::string& scheme, int c) {
    return TreeSpec{n, k, scheme_from_string(scheme), c};
}

py::dict report_dict(const Program& program) {
    const StepCountReport r = step_report(program);
    const GateCost g = gate_cost(program);
    py::dict d;
    d["total"] = r.total;
    d["address_setting"] = r.address_setting;
    d["data_fetch"] = r.data_fetch;
    d["uncomputing"] = r.uncomputing;
    d["swaps"] = g.swaps;
    d["controlled_swaps"] = g.controlled_swaps;
    d["other_gates"] = g.other;
    return d;
}

}  // namespace

PYBIND11_MODULE(_qram, mod) {
    mod.doc() = "bucket-brigade access-protocol compiler and noisy-query simulator";

    mod.def(
        "compile_json",
        [](const std::string& protocol, int n, int k, const std::string& scheme, int c, int m) {
            const Program p = compile(protocol, make_spec(n, k, scheme, c), m);
            return program_to_json(p);
        },
        py::arg("protocol"), py::arg("n"), py::arg("k"), py::arg("scheme") = "qutrit",
        py::arg("c") = 1, py::arg("m") = 0);

    mod.def(
        "step_report",
        [](const std::string& protocol, int n, int k, const std::string& scheme, int c, int m) {
            return report_dict(compile(protocol, make_spec(n, k, scheme, c), m));
        },
        py::arg("protocol"), py::arg("n"), py::arg("k"), py::arg("scheme") = "qutrit",
        py::arg("c") = 1, py::arg("m") = 0);

    mod.def(
        "validate_json",
        [](const std::string& text) { return validate(program_from_json(text)); },
        py::arg("program_json"));

    mod.def(
        "verify",
        [](const std::string& protocol, int n, int k, const std::string& scheme, int c, int m,
           uint64_t seed) {
            const Program p = compile(protocol, make_spec(n, k, scheme, c), m);
            Rng rng(seed);
            MemoryTable memory = MemoryTable::random(p.spec, p.m, rng);
            double max_dev = 0.0;
            bool restored = true;
            const uint64_t addresses = uint64_t{1} << (p.m + n);
            for (uint64_t v = 0; v < addresses; ++v) {
                QueryInput in;
                in.branches.push_back(
                    {v >> n, v & ((uint64_t{1} << n) - 1), 0, {1.0, 0.0}});
                BranchSim sim(p, memory, in);
                max_dev = std::max(max_dev, sim.noiseless_deviation(1));
                restored = restored && sim.noiseless_report().restored;
            }
            py::dict d;
            d["max_deviation"] = max_dev;
            d["restored"] = restored;
            d["pass"] = restored && max_dev < 1e-9;
            return d;
        },
        py::arg("protocol"), py::arg("n"), py::arg("k"), py::arg("scheme") = "qutrit",
        py::arg("c") = 1, py::arg("m") = 0, py::arg("seed") = kDefaultSeed);

    mod.def(
        "estimate_fidelity",
        [](const std::string& protocol, int n, int k, const std::string& scheme, int c, int m,
           double gamma, double p_depol, int trajectories, uint64_t seed, int threads) {
            const Program p = compile(protocol, make_spec(n, k, scheme, c), m);
            Rng rng(point_seed(seed, n, k));
            MemoryTable memory = MemoryTable::random(p.spec, p.m, rng);
            QueryInput in = QueryInput::uniform_addresses(p.spec, p.m);
            BranchSim sim(p, memory, in);
            const FidelityEstimate est = sim.estimate_fidelity(
                NoiseModel{gamma, p_depol}, trajectories, point_seed(seed, n, k), threads);
            py::dict d;
            d["mean"] = est.mean;
            d["stderr"] = est.stderr_;
            d["lambda_mean"] = est.lambda_mean;
            d["trajectories"] = est.trajectories;
            d["steps_total"] = p.tick_count();
            return d;
        },
        py::arg("protocol"), py::arg("n"), py::arg("k"), py::arg("scheme") = "qutrit",
        py::arg("c") = 1, py::arg("m") = 0, py::arg("gamma") = 0.0, py::arg("p") = 0.0,
        py::arg("trajectories") = 1000, py::arg("seed") = kDefaultSeed, py::arg("threads") = 1);

    mod.def(
        "cost_factor",
        [](const std::string& protocol, int n, int k, int c) {
            return cost_factor(protocol, n, k, c).value;
        },
        py::arg("protocol"), py::arg("n"), py::arg("k"), py::arg("c") = 1);

    mod.def("optimal_bandwidth", &optimal_bandwidth, py::arg("n"), py::arg("k"));

    mod.def(
        "fit_error_model",
        [](const std::vector<std::tuple<int, int, double, double>>& rows) {
            std::vector<FitSample> samples;
            for (const auto& [n, k, eps, f] : rows) samples.push_back({n, k, eps, f});
            const FitResult r = fit_error_model(samples);
            py::dict d;
            d["A"] = r.A;
            d["C"] = r.C;
            d["r_squared"] = r.r_squared;
            d["points"] = r.points;
            return d;
        },
        py::arg("samples"));
}
