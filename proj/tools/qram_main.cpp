// qram: compile bucket-brigade access schedules, verify their semantics,
// run noisy trajectory sweeps, fit the error model, and report cost factors.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qram/branch_sim.hpp"
#include "qram/dense_sim.hpp"
#include "qram/experiment.hpp"
#include "qram/metrics.hpp"
#include "qram/protocols.hpp"

namespace {

using namespace qram;

struct CommonArgs {
    int n = 2, k = 1, c = 1, m = 0;
    std::string protocol = "parallel";
    std::string scheme = "qutrit";
    uint64_t seed = kDefaultSeed;
    std::string out;
    int threads = 1;
};

void add_instance_flags(CLI::App* cmd, CommonArgs& a, bool with_protocol = true) {
    if (with_protocol)
        cmd->add_option("--protocol", a.protocol, "nonparallel|parallel|hb-parallel|hybrid-parallel")
            ->check(CLI::IsMember({"nonparallel", "parallel", "hb-parallel", "hybrid-parallel"}));
    cmd->add_option("--n", a.n, "address length")->required();
    cmd->add_option("--k", a.k, "word length")->required();
    cmd->add_option("--c", a.c, "bandwidth (hb-parallel)");
    cmd->add_option("--m", a.m, "high-address bits (hybrid-parallel)");
    cmd->add_option("--scheme", a.scheme, "qutrit|qubit")
        ->check(CLI::IsMember({"qutrit", "qubit"}));
    cmd->add_option("--seed", a.seed, "rng seed");
    cmd->add_option("--out", a.out, "output path (default: stdout)");
    cmd->add_option("--threads", a.threads, "worker threads");
}

Program compile_from_args(const CommonArgs& a) {
    TreeSpec spec{a.n, a.k, scheme_from_string(a.scheme),
                  a.protocol == "hb-parallel" ? a.c : 1};
    return compile(a.protocol, spec, a.protocol == "hybrid-parallel" ? a.m : 0);
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << text;
}

void print_report(std::ostream& os, const Program& program) {
    const StepCountReport r = step_report(program);
    const GateCost g = gate_cost(program);
    os << "protocol " << program.protocol << "  n=" << program.spec.n << " k=" << program.spec.k
       << " scheme=" << to_string(program.spec.scheme) << " c=" << program.spec.bandwidth
       << " m=" << program.m << "\n"
       << "steps: total " << r.total << " (address_setting " << r.address_setting
       << ", data_fetch " << r.data_fetch << ", uncomputing " << r.uncomputing << ")\n"
       << "gates: swaps " << g.swaps << ", controlled_swaps " << g.controlled_swaps << ", other "
       << g.other << "\n";
}

int cmd_compile(const CommonArgs& a) {
    Program program = compile_from_args(a);
    const auto problems = validate(program);
    if (!problems.empty()) {
        for (const auto& p : problems) std::cerr << "validation: " << p << "\n";
        return 1;
    }
    write_output(a.out, program_to_json(program));
    print_report(a.out.empty() ? std::cerr : std::cout, program);
    return 0;
}

int cmd_verify(const CommonArgs& a, const std::string& program_path, const std::string& mode) {
    Program program;
    if (!program_path.empty()) {
        std::ifstream f(program_path);
        if (!f) throw std::runtime_error("cannot open program file: " + program_path);
        std::stringstream ss;
        ss << f.rdbuf();
        program = program_from_json(ss.str());
    } else {
        program = compile_from_args(a);
    }
    const auto problems = validate(program);
    for (const auto& p : problems) std::cout << "validation: " << p << "\n";

    const TreeSpec& spec = program.spec;
    const int m = program.m;
    Rng rng(a.seed);
    MemoryTable memory = MemoryTable::random(spec, m, rng);
    const QuditLayout layout = program.layout();

    bool use_dense = mode == "dense";
    if (mode == "auto") {
        int64_t dim = 1;
        for (int q = 0; q < layout.total && dim <= (int64_t{1} << 20); ++q) dim *= layout.dim(q);
        use_dense = dim <= (int64_t{1} << 20);
    }

    double max_dev = 0.0, max_restore = 0.0, max_double = 0.0;
    const uint64_t addresses = uint64_t{1} << (m + spec.n);
    const uint64_t words = uint64_t{1} << spec.k;

    auto account = [&](double dev, double restore, double dq) {
        max_dev = std::max(max_dev, dev);
        max_restore = std::max(max_restore, restore);
        max_double = std::max(max_double, dq);
    };

    if (use_dense) {
        DenseSim sim(program, memory);
        auto check_input = [&](const QueryInput& in) {
            auto res = sim.run_noiseless(in);
            const auto ideal = ideal_bus_vector(in, &memory, layout);
            double dev = 0.0;
            for (size_t i = 0; i < ideal.size(); ++i)
                dev = std::max(dev, std::abs(res.bus[i] - ideal[i]));
            sim.reset(in);
            sim.apply_program();
            sim.apply_program();
            const auto twice = sim.bus_amplitudes();
            const auto self = ideal_bus_vector(in, nullptr, layout);
            double dq = 0.0;
            for (size_t i = 0; i < self.size(); ++i)
                dq = std::max(dq, std::abs(twice[i] - self[i]));
            account(dev, res.restoration_dev, dq);
        };
        for (uint64_t v = 0; v < addresses; ++v)
            for (uint64_t z = 0; z < words; ++z) {
                QueryInput in;
                in.branches.push_back({v >> spec.n, v & ((uint64_t{1} << spec.n) - 1), z, 1.0});
                check_input(in);
            }
        for (int r = 0; r < 20; ++r) {
            Rng srng = Rng::substream(a.seed, 1000 + r);
            check_input(QueryInput::random_superposition(spec, m, srng));
        }
    } else {
        auto check_input = [&](const QueryInput& in) {
            BranchSim sim(program, memory, in);
            account(sim.noiseless_deviation(1), sim.noiseless_report().restored ? 0.0 : 1.0,
                    sim.noiseless_deviation(2));
        };
        for (uint64_t v = 0; v < addresses; ++v)
            for (uint64_t z = 0; z < words; ++z) {
                QueryInput in;
                in.branches.push_back({v >> spec.n, v & ((uint64_t{1} << spec.n) - 1), z, 1.0});
                check_input(in);
            }
        for (int r = 0; r < 20; ++r) {
            Rng srng = Rng::substream(a.seed, 1000 + r);
            check_input(QueryInput::random_superposition(spec, m, srng));
        }
    }

    std::printf("backend: %s\n", use_dense ? "dense" : "branch");
    std::printf("max output deviation:      %.3e\n", max_dev);
    std::printf("max tree restoration dev:  %.3e\n", max_restore);
    std::printf("max double-query dev:      %.3e\n", max_double);
    const bool pass = problems.empty() && max_dev < 1e-9 && max_restore < 1e-10 &&
                      max_double < 1e-9;
    std::printf("%s\n", pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
}

int cmd_simulate(const CommonArgs& a, double gamma, double p, int trajectories, bool sweep,
                 int n_max, int k_max) {
    SweepConfig cfg;
    cfg.protocol = a.protocol;
    cfg.scheme = scheme_from_string(a.scheme);
    cfg.n_min = a.n;
    cfg.n_max = sweep ? n_max : a.n;
    cfg.k_min = a.k;
    cfg.k_max = sweep ? k_max : a.k;
    cfg.c = a.c;
    cfg.m = a.m;
    cfg.gamma = gamma;
    cfg.p = p;
    cfg.trajectories = trajectories;
    cfg.seed = a.seed;
    cfg.threads = a.threads;

    std::string out = csv_header();
    for (const SweepRow& row : run_sweep(cfg)) out += csv_row(row);
    write_output(a.out, out);
    return 0;
}

int cmd_fit(const std::string& input_path, const std::string& out) {
    std::vector<FitSample> samples;
    if (input_path.empty() || input_path == "-") {
        samples = fit_samples_from_csv(std::cin);
    } else {
        std::ifstream f(input_path);
        if (!f) throw std::runtime_error("cannot open CSV: " + input_path);
        samples = fit_samples_from_csv(f);
    }
    FitResult r;
    try {
        r = fit_error_model(samples);
    } catch (const std::invalid_argument& e) {
        // degenerate input data is a check failure, not a usage error
        throw std::runtime_error(e.what());
    }
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "{\"A\": %.12g, \"C\": %.12g, \"r_squared\": %.12g, \"points\": %d}\n", r.A, r.C,
                  r.r_squared, r.points);
    write_output(out, buf);
    return 0;
}

int cmd_cost(int n, int k, int c, int m, const std::string& out) {
    std::string text;
    char buf[160];
    for (const char* proto : {"nonparallel", "high-bandwidth", "parallel", "hb-parallel"}) {
        const auto r = cost_factor(proto, n, k, c);
        std::snprintf(buf, sizeof(buf), "%-16s n=%d k=%d c=%d  cost_factor=%.10g\n", proto, n, k,
                      r.c, r.value);
        text += buf;
    }
    std::snprintf(buf, sizeof(buf), "optimal bandwidth c* = %d\n", optimal_bandwidth(n, k));
    text += buf;
    if (m > 0) {
        const auto b = analytic_baselines(n, m, k);
        std::snprintf(buf, sizeof(buf),
                      "hybrid qrom+qrom: time=%.10g error_order=%.10g\n"
                      "hybrid-parallel:  time=%.10g error_order=%.10g\n",
                      b.hybrid_qrom_time, b.hybrid_qrom_error_order, b.hybrid_parallel_time,
                      b.hybrid_parallel_error_order);
        text += buf;
    }
    write_output(out, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bucket-brigade access-protocol compiler and noisy-query simulator"};
    app.require_subcommand(1);

    CommonArgs a;
    double gamma = 0.0, p = 0.0;
    int trajectories = 10000;
    int n_max = -1, k_max = -1;
    std::string program_path, mode = "auto", fit_input;

    auto* compile_cmd = app.add_subcommand("compile", "compile a protocol to program JSON");
    add_instance_flags(compile_cmd, a);

    auto* verify_cmd = app.add_subcommand("verify", "check query semantics and restoration");
    add_instance_flags(verify_cmd, a);
    verify_cmd->add_option("--program", program_path, "verify a program JSON file instead");
    verify_cmd->add_option("--mode", mode, "auto|dense|branch")
        ->check(CLI::IsMember({"auto", "dense", "branch"}));

    auto* sim_cmd = app.add_subcommand("simulate", "estimate fidelity at one grid point");
    add_instance_flags(sim_cmd, a);
    sim_cmd->add_option("--gamma", gamma, "damping rate per qudit per tick");
    sim_cmd->add_option("--p", p, "depolarizing probability per qudit per tick");
    sim_cmd->add_option("--trajectories", trajectories, "Monte-Carlo repetitions");

    auto* sweep_cmd = app.add_subcommand("sweep", "fidelity sweep over an (n,k) grid");
    add_instance_flags(sweep_cmd, a);
    sweep_cmd->add_option("--n-max", n_max, "upper n (inclusive); default --n");
    sweep_cmd->add_option("--k-max", k_max, "upper k (inclusive); default --k");
    sweep_cmd->add_option("--gamma", gamma, "damping rate per qudit per tick");
    sweep_cmd->add_option("--p", p, "depolarizing probability per qudit per tick");
    sweep_cmd->add_option("--trajectories", trajectories, "Monte-Carlo repetitions");

    auto* fit_cmd = app.add_subcommand("fit", "fit 1-F = A(Cn^2+nk)eps to sweep CSV");
    fit_cmd->add_option("--input", fit_input, "sweep CSV path (default: stdin)");
    fit_cmd->add_option("--out", a.out, "output path");

    auto* cost_cmd = app.add_subcommand("cost", "closed-form cost factors");
    cost_cmd->add_option("--n", a.n, "address length")->required();
    cost_cmd->add_option("--k", a.k, "word length")->required();
    cost_cmd->add_option("--c", a.c, "bandwidth");
    cost_cmd->add_option("--m", a.m, "add hybrid baselines for 2^(m+n) entries");
    cost_cmd->add_option("--out", a.out, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (compile_cmd->parsed()) return cmd_compile(a);
        if (verify_cmd->parsed()) return cmd_verify(a, program_path, mode);
        if (sim_cmd->parsed()) return cmd_simulate(a, gamma, p, trajectories, false, 0, 0);
        if (sweep_cmd->parsed())
            return cmd_simulate(a, gamma, p, trajectories, true, n_max < 0 ? a.n : n_max,
                                k_max < 0 ? a.k : k_max);
        if (fit_cmd->parsed()) return cmd_fit(fit_input, a.out);
        if (cost_cmd->parsed()) return cmd_cost(a.n, a.k, a.c, a.m, a.out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
