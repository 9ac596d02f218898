#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "qram/metrics.hpp"
#include "qram/query.hpp"
#include "qram/topology.hpp"

namespace qram {

constexpr uint64_t kDefaultSeed = 7;

struct SweepConfig {
    std::string protocol = "parallel";
    Scheme scheme = Scheme::Qutrit;
    int n_min = 3, n_max = 8;
    int k_min = 4, k_max = 4;
    int c = 1;
    int m = 0;
    double gamma = 0.0;
    double p = 0.0;
    int trajectories = 10000;
    uint64_t seed = kDefaultSeed;
    int threads = 1;
};

struct SweepRow {
    int n = 0, k = 0;
    std::string scheme, protocol;
    int c = 1, m = 0;
    double gamma = 0.0, p = 0.0;
    int trajectories = 0;
    uint64_t seed = 0;
    double fidelity_mean = 0.0, fidelity_stderr = 0.0, lambda_mean = 0.0;
    int steps_total = 0;
    std::string error;
};

std::string csv_header();
std::string csv_row(const SweepRow& row);

// Derived stream for one grid point: memory contents and trajectory streams
// are functions of (seed, n, k) only, so rows are reproducible point-wise.
uint64_t point_seed(uint64_t seed, int n, int k);

SweepRow run_point(const SweepConfig& config, int n, int k);
std::vector<SweepRow> run_sweep(const SweepConfig& config);

// Parse rows written by csv_row (the `error` column must be empty);
// eps = gamma + p.
std::vector<FitSample> fit_samples_from_csv(std::istream& in);

}  // namespace qram
