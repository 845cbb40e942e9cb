#include "swipt/socp.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace swipt;

namespace {

// Random program over the box [-1, 1]^n with three cones around a known interior point.
SocProgram random_program(std::uint64_t seed, int n, bool make_infeasible) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    SocProgram p(n);
    for (int j = 0; j < n; ++j) p.set_bounds(j, -1.0, 1.0);
    Vec x0(n);
    for (int j = 0; j < n; ++j) x0(j) = u(rng);
    for (int c = 0; c < 3; ++c) {
        Mat A(2, n);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = g(rng);
        Vec b(2), cv(n);
        for (int i = 0; i < 2; ++i) b(i) = 0.3 * g(rng);
        for (int j = 0; j < n; ++j) cv(j) = 0.3 * g(rng);
        // Offset so x0 satisfies the cone with margin 0.2.
        const double d = (A * x0 + b).norm() - cv.dot(x0) + 0.2;
        p.add_cone(A, b, cv, d);
    }
    if (make_infeasible) {
        // Force x_0 above the box.
        Vec e = Vec::Zero(n);
        e(0) = -1.0;
        p.add_linear(e, -1.5);
    }
    return p;
}

// Exhaustive search over the box at the given resolution; best objective or -inf.
double grid_best(const SocProgram& p, double step, const Vec* objective, Vec* arg = nullptr) {
    const int n = p.n_vars;
    const int pts = static_cast<int>(std::round(2.0 / step)) + 1;
    std::vector<int> idx(n, 0);
    double best = -INFINITY;
    Vec x(n);
    while (true) {
        for (int j = 0; j < n; ++j) x(j) = -1.0 + idx[j] * step;
        if (p.max_violation(x) <= 0) {
            const double v = objective ? objective->dot(x) : 0.0;
            if (v > best) {
                best = v;
                if (arg) *arg = x;
            }
        }
        int j = 0;
        while (j < n && ++idx[j] == pts) idx[j++] = 0;
        if (j == n) break;
    }
    return best;
}

}  // namespace

TEST_CASE("origin solves a homogeneous ball") {
    SocProgram p(3);
    p.add_cone(Mat::Identity(3, 3), Vec::Zero(3), Vec::Zero(3), 1.0);
    FeasibilityResult r = solve_feasibility(p);
    CHECK(r.status == SolveStatus::feasible);
    CHECK(r.max_violation <= 1e-8);
}

TEST_CASE("disjoint sets are infeasible") {
    SocProgram p(2);
    p.add_cone(Mat::Identity(2, 2), Vec::Zero(2), Vec::Zero(2), 1.0);
    Vec g(2);
    g << -1.0, 0.0;
    p.add_linear(g, -2.0);  // x1 >= 2
    CHECK(solve_feasibility(p).status == SolveStatus::infeasible);
}

TEST_CASE("maximize over the unit ball") {
    SocProgram p(1);
    p.add_cone(Mat::Identity(1, 1), Vec::Zero(1), Vec::Zero(1), 1.0);
    p.objective = Vec::Ones(1);
    FeasibilityResult r = solve_maximize(p);
    REQUIRE(r.status == SolveStatus::feasible);
    CHECK(r.point(0) == doctest::Approx(1.0).epsilon(1e-7));

    SocProgram q(2);
    q.add_cone(Mat::Identity(2, 2), Vec::Zero(2), Vec::Zero(2), 1.0);
    q.objective = Vec::Ones(2);
    FeasibilityResult s = solve_maximize(q);
    REQUIRE(s.status == SolveStatus::feasible);
    CHECK(s.objective == doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));
}

TEST_CASE("unbounded objective is reported") {
    SocProgram p(2);
    Vec g(2);
    g << 1.0, -1.0;
    p.add_linear(g, 0.0);  // x0 <= x1, no upper limit
    p.objective = Vec::Ones(2);
    CHECK(solve_maximize(p).status == SolveStatus::unbounded);
}

TEST_CASE("malformed programs are rejected") {
    SocProgram p(2);
    p.add_cone(Mat::Identity(3, 3), Vec::Zero(3), Vec::Zero(3), 1.0);
    CHECK_THROWS(p.validate());
    CHECK_THROWS(solve_feasibility(p));
    SocProgram q(2);
    q.set_bounds(0, 1.0, -1.0);
    CHECK_THROWS(q.validate());
}

TEST_CASE("feasibility status agrees with a grid search") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed)
        for (bool infeasible : {false, true}) {
            SocProgram p = random_program(seed, 3, infeasible);
            FeasibilityResult r = solve_feasibility(p);
            const bool grid_feasible = std::isfinite(grid_best(p, 2e-2, nullptr));
            CHECK(r.status == (grid_feasible ? SolveStatus::feasible : SolveStatus::infeasible));
            if (r.status == SolveStatus::feasible) CHECK(r.max_violation <= 1e-8);
        }
}

TEST_CASE("optimum agrees with a grid search") {
    for (std::uint64_t seed = 11; seed <= 16; ++seed) {
        SocProgram p = random_program(seed, 2, false);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(0.0, 1.0);
        Vec obj(2);
        obj << g(rng), g(rng);
        p.objective = obj;
        FeasibilityResult r = solve_maximize(p);
        REQUIRE(r.status == SolveStatus::feasible);
        const double grid = grid_best(p, 1e-3, &obj);
        // The grid value is a lower bound, within one grid cell of the optimum.
        CHECK(r.objective >= grid - 1e-9);
        CHECK(r.objective - grid <= 1e-3 * obj.lpNorm<1>() + 1e-9);
    }
}
