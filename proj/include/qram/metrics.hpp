#pragma once

#include <string>
#include <vector>

namespace qram {

struct FitSample {
    int n = 0;
    int k = 0;
    double eps = 0.0;  // per-qudit error strength (gamma + p)
    double fidelity = 1.0;
};

struct FitResult {
    double A = 0.0;
    double C = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

// Least-squares fit of 1-F = A*(C*n^2 + n*k)*eps, solved on the linear
// reparameterization 1-F = (A*C)*(n^2 eps) + A*(n k eps).
FitResult fit_error_model(const std::vector<FitSample>& samples);

struct CostFactorReport {
    std::string protocol;
    int n = 0, k = 0, c = 1;
    double value = 0.0;
};

// Closed-form cost factors (qutrit normalization T*eps_t / (n*eps)):
//   nonparallel k^2 n^2, hb k^2 n^2 / c, parallel (n+k)^2,
//   hb-parallel c n^2 + k^2/c + 2 k n.
CostFactorReport cost_factor(const std::string& protocol, int n, int k, int c = 1);

struct BaselineReport {
    double hybrid_qrom_time = 0.0;
    double hybrid_qrom_error_order = 0.0;
    double hybrid_parallel_time = 0.0;
    double hybrid_parallel_error_order = 0.0;
};

// Analytic time / error-order comparison of the sequential QRAM+QROM
// composition vs the hybrid-parallel protocol (error orders up to the common
// eps factor, qutrit scheme).
BaselineReport analytic_baselines(int n, int m, int k);

// Integer divisor of k minimizing c n^2 + k^2/c + 2 k n.
int optimal_bandwidth(int n, int k);

}  // namespace qram
