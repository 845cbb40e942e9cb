#include "swipt/bisection.hpp"
#include "swipt/power_control.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace swipt;

TEST_CASE("synthetic threshold") {
    BisectionConfig cfg{0.0, 1.0, 1e-6, true};
    int calls = 0;
    BisectionResult r = bisect_quasiconcave(
        [&](double t) {
            ++calls;
            return t <= 0.7;
        },
        cfg);
    CHECK(std::abs(r.t_star - 0.7) <= 1e-6);
    CHECK(r.t_star <= 0.7);
    CHECK(r.iterations <= 20);
    CHECK(r.iterations <= bisection_iteration_bound(cfg));
    CHECK(bisection_iteration_bound(cfg) == 20);
}

TEST_CASE("always feasible returns the upper end") {
    BisectionResult r = bisect_quasiconcave([](double) { return true; }, {0.0, 2.0, 1e-3, true});
    CHECK(r.t_star == 2.0);
}

TEST_CASE("infeasible lower end and non-monotone oracles") {
    CHECK_THROWS(bisect_quasiconcave([](double) { return false; }, {0.0, 1.0, 1e-3, true}));
    // Upper end feasible while the lower end is not.
    CHECK_THROWS_AS(bisect_quasiconcave([](double t) { return t > 0.5; }, {0.0, 1.0, 1e-3, true}),
                    protocol_violation);
    CHECK_THROWS(BisectionConfig{1.0, 0.0, 1e-3, true}.validate());
    CHECK_THROWS(BisectionConfig{0.0, 1.0, 0.0, true}.validate());
}

TEST_CASE("max-min SINR matches an exhaustive coefficient grid") {
    // M = 2, K = 2: x_mk = sqrt(eta_mk rho_mk) on [0, 1] with sum_k x_mk^2 <= 1 per AP.
    for (std::uint64_t seed : {3, 4, 5}) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.2, 2.0);
        LargeScaleGains g{Mat(2, 2)};
        for (int i = 0; i < 4; ++i) g.zeta(i % 2, i / 2) = u(rng);
        EstimationStatistics st = estimation_statistics(g, {2, 1.0});
        const double p_d = 3.0;
        MaxminResult r = maxmin_rate(st, g, p_d, 0.0);
        CHECK(r.solver_failures == 0);

        // SINR_k = P (sum_m x_mk sqrt(rho_mk))^2 / (P sum_m zeta_mk sum_i x_mi^2 + 1)
        double best = 0;
        const int n = 101;  // 1e-2 resolution
        const double sr[2][2] = {{std::sqrt(st.rho(0, 0)), std::sqrt(st.rho(0, 1))},
                                 {std::sqrt(st.rho(1, 0)), std::sqrt(st.rho(1, 1))}};
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const double x00 = a / 100.0, x01 = b / 100.0;
                if (x00 * x00 + x01 * x01 > 1 + 1e-12) continue;
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        const double x10 = c / 100.0, x11 = d / 100.0;
                        if (x10 * x10 + x11 * x11 > 1 + 1e-12) continue;
                        const double load0 = x00 * x00 + x01 * x01, load1 = x10 * x10 + x11 * x11;
                        const double c0 = x00 * sr[0][0] + x10 * sr[1][0], c1 = x01 * sr[0][1] + x11 * sr[1][1];
                        const double g0 = p_d * c0 * c0 / (p_d * (g.zeta(0, 0) * load0 + g.zeta(1, 0) * load1) + 1);
                        const double g1 = p_d * c1 * c1 / (p_d * (g.zeta(0, 1) * load0 + g.zeta(1, 1) * load1) + 1);
                        best = std::max(best, std::min(g0, g1));
                    }
            }
        CHECK(r.common_value >= best - 2e-4);  // bisection stops within epsilon
        CHECK(r.common_value <= best * 1.02);
    }
}
