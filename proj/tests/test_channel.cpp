#include "swipt/channel.hpp"

#include <doctest.h>

#include <cmath>

using namespace swipt;

namespace {

LargeScaleGains constant_gains(int m, int k, double z) { return {Mat::Constant(m, k, z)}; }

}  // namespace

TEST_CASE("tiny gain gives a tiny channel") {
    auto g = constant_gains(2, 2, 1e-300);
    ChannelRealization ch = draw_channel(g, 3);
    CHECK(ch.h.cwiseAbs().maxCoeff() < 1e-140);
}

TEST_CASE("channel draws are deterministic per seed") {
    auto g = constant_gains(3, 2, 0.7);
    CHECK(draw_channel(g, 5).h == draw_channel(g, 5).h);
    CHECK(draw_channel(g, 5).h != draw_channel(g, 6).h);
}

TEST_CASE("channel second moment equals the large-scale gain") {
    auto g = constant_gains(1, 1, 0.3);
    Rng rng = make_rng(17);
    const int n = 100000;
    double s = 0, s2 = 0;
    for (int t = 0; t < n; ++t) {
        const double v = std::norm(draw_channel(g, rng).h(0, 0));
        s += v;
        s2 += v * v;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / (n - 1));
    CHECK(std::abs(mean - 0.3) < 3 * se);
}

TEST_CASE("MMSE statistics for the worked example") {
    // tau_p = 2, P_p = 1, zeta = 0.5: c = sqrt(2) 0.5 / 2 = 0.35355, rho = 0.25.
    auto g = constant_gains(1, 2, 0.5);
    UplinkPilotConfig cfg{2, 1.0};
    EstimationStatistics st = estimation_statistics(g, cfg);
    CHECK(st.c(0, 0) == doctest::Approx(0.3535533906).epsilon(1e-9));
    CHECK(st.rho(0, 0) == doctest::Approx(0.25).epsilon(1e-12));

    Rng rng = make_rng(21);
    const int n = 100000;
    double s = 0, s2 = 0;
    for (int t = 0; t < n; ++t) {
        ChannelRealization ch = draw_channel(g, rng);
        const double v = std::norm(estimate_uplink(ch, cfg, rng).h_hat(0, 0));
        s += v;
        s2 += v * v;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / (n - 1));
    CHECK(std::abs(mean - 0.25) < 3 * se);
}

TEST_CASE("estimation limits") {
    auto g = constant_gains(2, 2, 0.8);
    EstimationStatistics strong = estimation_statistics(g, {2, 1e12});
    CHECK(strong.rho(0, 0) == doctest::Approx(0.8).epsilon(1e-9));
    auto weak = constant_gains(2, 2, 1e-14);
    CHECK(estimation_statistics(weak, {2, 1.0}).rho.maxCoeff() < 1e-26);

    Rng rng = make_rng(2);
    ChannelRealization ch = draw_channel(g, rng);
    ChannelEstimate e = estimate_uplink(ch, {2, 1e14}, rng);
    CHECK(e.error.cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("too few pilots is unsupported") {
    auto g = constant_gains(2, 3, 0.5);
    CHECK_THROWS_AS(estimation_statistics(g, {2, 1.0}), unsupported_configuration);
}

TEST_CASE("estimate and error are uncorrelated") {
    auto g = constant_gains(1, 1, 0.6);
    UplinkPilotConfig cfg{1, 2.0};
    Rng rng = make_rng(33);
    const int n = 100000;
    cplx s = 0;
    double s2 = 0;
    for (int t = 0; t < n; ++t) {
        ChannelRealization ch = draw_channel(g, rng);
        ChannelEstimate e = estimate_uplink(ch, cfg, rng);
        const cplx v = e.h_hat(0, 0) * std::conj(e.error(0, 0));
        s += v;
        s2 += std::norm(v);
    }
    const cplx mean = s / double(n);
    const double se = std::sqrt((s2 / n - std::norm(mean)) / (n - 1));
    CHECK(std::abs(mean.real()) < 3 * se);
    CHECK(std::abs(mean.imag()) < 3 * se);
}
