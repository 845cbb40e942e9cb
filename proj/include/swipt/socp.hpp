#pragma once

#include "swipt/common.hpp"

#include <Eigen/Sparse>

#include <optional>
#include <string>
#include <vector>

namespace swipt {

using SpMat = Eigen::SparseMatrix<double>;
using SpVec = Eigen::SparseVector<double>;

// ||A x + b|| <= c.x + d
struct ConeConstraint {
    SpMat A;
    Vec b;
    SpVec c;
    double d = 0.0;
};

// g.x <= h
struct LinearConstraint {
    SpVec g;
    double h = 0.0;
};

struct SocProgram {
    int n_vars = 0;
    std::optional<Vec> objective;  // maximize objective.x
    std::vector<ConeConstraint> cones;
    std::vector<LinearConstraint> linear;
    Vec lower;  // -inf allowed
    Vec upper;  // +inf allowed

    SocProgram() = default;
    explicit SocProgram(int n);

    void add_cone(SpMat A, Vec b, SpVec c, double d);
    void add_cone(const Mat& A, const Vec& b, const Vec& c, double d);
    void add_linear(SpVec g, double h);
    void add_linear(const Vec& g, double h);
    void set_bounds(int i, double lo, double hi);

    void validate() const;
    // Largest violation over all constraints, each cone and row scaled to unit size.
    double max_violation(const Vec& x) const;
    // One constraint per line, for debugging.
    std::string dump() const;
};

enum class SolveStatus { feasible, infeasible, unbounded, numerical_failure };

std::string to_string(SolveStatus s);

struct SolverOptions {
    double feas_tol = 1e-8;  // residual accepted as feasible
    double gap_tol = 1e-8;   // duality gap, absolute or relative, for optimization
    int max_iter = 120;
    bool fallback = true;    // subgradient projections after an IPM breakdown
};

struct FeasibilityResult {
    SolveStatus status = SolveStatus::numerical_failure;
    Vec point;
    double max_violation = 0.0;
    int iterations = 0;
    double arithmetic_ops_estimate = 0.0;
    double objective = 0.0;  // objective.x for solve_maximize, phase-1 slack otherwise
    std::string diagnostics;
};

FeasibilityResult solve_feasibility(const SocProgram& prog, const SolverOptions& opts = {});
FeasibilityResult solve_maximize(const SocProgram& prog, const SolverOptions& opts = {});

}  // namespace swipt
