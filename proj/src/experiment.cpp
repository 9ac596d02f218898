#include "qram/experiment.hpp"

#include <cstdio>
#include <sstream>

#include "qram/branch_sim.hpp"
#include "qram/protocols.hpp"

namespace qram {

std::string csv_header() {
    return "n,k,scheme,protocol,c,m,gamma,p,trajectories,seed,fidelity_mean,fidelity_stderr,"
           "lambda_mean,steps_total,error\n";
}

std::string csv_row(const SweepRow& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%d,%d,%s,%s,%d,%d,%.10g,%.10g,%d,%llu,%.10g,%.10g,%.10g,%d,%s\n", r.n, r.k,
                  r.scheme.c_str(), r.protocol.c_str(), r.c, r.m, r.gamma, r.p, r.trajectories,
                  static_cast<unsigned long long>(r.seed), r.fidelity_mean, r.fidelity_stderr,
                  r.lambda_mean, r.steps_total, r.error.c_str());
    return buf;
}

uint64_t point_seed(uint64_t seed, int n, int k) {
    uint64_t s = seed;
    splitmix64(s);
    s ^= 0x9e3779b97f4a7c15ull * static_cast<uint64_t>(n + 1);
    splitmix64(s);
    s ^= 0xbf58476d1ce4e5b9ull * static_cast<uint64_t>(k + 1);
    return splitmix64(s);
}

SweepRow run_point(const SweepConfig& config, int n, int k) {
    if (config.trajectories < 100)
        throw std::invalid_argument("sweeps need at least 100 trajectories");
    SweepRow row;
    row.n = n;
    row.k = k;
    row.scheme = to_string(config.scheme);
    row.protocol = config.protocol;
    row.c = config.protocol == "hb-parallel" ? config.c : 1;
    row.m = config.protocol == "hybrid-parallel" ? config.m : 0;
    row.gamma = config.gamma;
    row.p = config.p;
    row.trajectories = config.trajectories;
    row.seed = config.seed;
    try {
        TreeSpec spec{n, k, config.scheme, row.c};
        Program program = compile(config.protocol, spec, row.m);
        row.steps_total = program.tick_count();

        const uint64_t ps = point_seed(config.seed, n, k);
        Rng mem_rng(ps);
        MemoryTable memory = MemoryTable::random(spec, row.m, mem_rng);
        QueryInput input = QueryInput::uniform_addresses(spec, row.m);
        BranchSim sim(program, memory, input);
        NoiseModel model{config.gamma, config.p};
        FidelityEstimate est =
            sim.estimate_fidelity(model, config.trajectories, ps, config.threads);
        row.fidelity_mean = est.mean;
        row.fidelity_stderr = est.stderr_;
        row.lambda_mean = est.lambda_mean;
    } catch (const std::exception& e) {
        std::string msg = e.what();
        for (char& ch : msg)
            if (ch == ',' || ch == '\n') ch = ';';
        row.error = msg;
    }
    return row;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
    std::vector<SweepRow> rows;
    for (int n = config.n_min; n <= config.n_max; ++n)
        for (int k = config.k_min; k <= config.k_max; ++k)
            rows.push_back(run_point(config, n, k));
    return rows;
}

std::vector<FitSample> fit_samples_from_csv(std::istream& in) {
    std::vector<FitSample> samples;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("n,k,", 0) == 0) continue;  // header
        }
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 14) throw std::invalid_argument("bad CSV row: " + line);
        if (fields.size() >= 15 && !fields[14].empty())
            continue;  // skip rows with a recorded per-point error
        FitSample s;
        s.n = std::stoi(fields[0]);
        s.k = std::stoi(fields[1]);
        s.eps = std::stod(fields[6]) + std::stod(fields[7]);
        s.fidelity = std::stod(fields[10]);
        samples.push_back(s);
    }
    return samples;
}

}  // namespace qram
