#pragma once

#include <functional>

namespace swipt {

struct BisectionConfig {
    double t_min = 0.0;
    double t_max = 1.0;
    double epsilon = 1e-4;
    bool check_lower = true;  // evaluate t_min once; skip when it is feasible by construction

    void validate() const;
};

struct BisectionResult {
    double t_star = 0.0;  // largest target certified feasible
    double t_upper = 0.0; // smallest target known infeasible (t_max if never refuted)
    int iterations = 0;   // midpoint evaluations
};

// Bisection for the largest feasible target of a monotone oracle.
BisectionResult bisect_quasiconcave(const std::function<bool(double)>& feasible, const BisectionConfig& cfg);

// ceil(log2((t_max - t_min) / epsilon)), the midpoint evaluation budget.
int bisection_iteration_bound(const BisectionConfig& cfg);

}  // namespace swipt
