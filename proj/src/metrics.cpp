#include "qram/metrics.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace qram {

FitResult fit_error_model(const std::vector<FitSample>& samples) {
    if (samples.size() < 4) throw std::invalid_argument("fit needs at least 4 samples");
    std::set<int> ns, ks;
    for (const auto& s : samples) {
        ns.insert(s.n);
        ks.insert(s.k);
    }
    if (ns.size() < 2 || ks.size() < 2)
        throw std::invalid_argument("fit needs at least 2 distinct n and 2 distinct k");

    // y = b1*x1 + b2*x2 with x1 = n^2 eps, x2 = n k eps, y = 1 - F
    double s11 = 0, s12 = 0, s22 = 0, s1y = 0, s2y = 0, sy = 0, syy = 0;
    for (const auto& s : samples) {
        const double x1 = double(s.n) * s.n * s.eps;
        const double x2 = double(s.n) * s.k * s.eps;
        const double y = 1.0 - s.fidelity;
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        s1y += x1 * y;
        s2y += x2 * y;
        sy += y;
        syy += y * y;
    }
    const double det = s11 * s22 - s12 * s12;
    if (std::abs(det) < 1e-30 * (s11 * s22 + 1e-300))
        throw std::invalid_argument("degenerate design: cannot separate n^2 and nk terms");
    const double b1 = (s1y * s22 - s2y * s12) / det;
    const double b2 = (s2y * s11 - s1y * s12) / det;

    FitResult r;
    r.points = static_cast<int>(samples.size());
    r.A = b2;
    r.C = b2 != 0.0 ? b1 / b2 : 0.0;

    double ss_res = 0.0;
    const double ybar = sy / samples.size();
    double ss_tot = 0.0;
    for (const auto& s : samples) {
        const double x1 = double(s.n) * s.n * s.eps;
        const double x2 = double(s.n) * s.k * s.eps;
        const double y = 1.0 - s.fidelity;
        const double e = y - (b1 * x1 + b2 * x2);
        ss_res += e * e;
        ss_tot += (y - ybar) * (y - ybar);
    }
    r.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot)
                               : (ss_res <= 1e-24 ? 1.0 : 0.0);
    return r;
}

CostFactorReport cost_factor(const std::string& protocol, int n, int k, int c) {
    if (n < 1 || k < 1 || c < 1) throw std::invalid_argument("n, k, c must be >= 1");
    CostFactorReport r;
    r.protocol = protocol;
    r.n = n;
    r.k = k;
    r.c = c;
    const double dn = n, dk = k, dc = c;
    if (protocol == "nonparallel") r.value = dk * dk * dn * dn;
    else if (protocol == "high-bandwidth" || protocol == "hb") r.value = dk * dk * dn * dn / dc;
    else if (protocol == "parallel") r.value = (dn + dk) * (dn + dk);
    else if (protocol == "hb-parallel") r.value = dc * dn * dn + dk * dk / dc + 2.0 * dk * dn;
    else if (protocol == "quantum-walk")
        throw std::runtime_error("no cost factor for the quantum-walk architecture");
    else
        throw std::invalid_argument("unknown protocol: " + protocol);
    return r;
}

BaselineReport analytic_baselines(int n, int m, int k) {
    if (n < 1 || k < 1 || m < 0) throw std::invalid_argument("need n,k >= 1 and m >= 0");
    BaselineReport r;
    const double pm = std::ldexp(1.0, m);  // 2^m
    r.hybrid_qrom_time = pm * (n + k);
    r.hybrid_qrom_error_order = pm * (n + k) * n;
    r.hybrid_parallel_time = pm * k + n;
    r.hybrid_parallel_error_order = (pm * k + n) * n;
    return r;
}

int optimal_bandwidth(int n, int k) {
    if (n < 1 || k < 1) throw std::invalid_argument("n, k must be >= 1");
    int best = 1;
    double best_value = 0.0;
    for (int c = 1; c <= k; ++c) {
        if (k % c != 0) continue;
        const double v = double(c) * n * n + double(k) * k / c + 2.0 * k * n;
        if (c == 1 || v < best_value) {
            best = c;
            best_value = v;
        }
    }
    return best;
}

}  // namespace qram
