#include "swipt/rates.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace swipt;

namespace {

oracle::Instance instance(std::uint64_t seed, int M, int K) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.2, 2.0), e(0.1, 1.0);
    oracle::Instance in;
    in.zeta.resize(M, K);
    in.eta.resize(M, K);
    in.tau_p = K;
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k) in.zeta(m, k) = u(rng);
    const Mat rho = in.rho();
    for (int m = 0; m < M; ++m) {
        double s = 0;
        for (int k = 0; k < K; ++k) {
            in.eta(m, k) = e(rng);
            s += in.eta(m, k) * rho(m, k);
        }
        in.eta.row(m) /= s;
    }
    return in;
}

struct Lib {
    LargeScaleGains g;
    EstimationStatistics st;
};

Lib lib(const oracle::Instance& in) {
    Lib l{{in.zeta}, {}};
    l.st = estimation_statistics(l.g, {static_cast<int>(in.tau_p), in.pp});
    return l;
}

}  // namespace

TEST_CASE("downlink SINR collapses") {
    LargeScaleGains g{Mat::Constant(1, 1, 0.6)};
    EstimationStatistics st = estimation_statistics(g, {1, 2.0});
    CHECK(dl_sinr_statistical(st, g, Mat::Zero(1, 1), 10.0, 0.0)(0) == 0.0);
    const double eta = 0.9, rho = st.rho(0, 0), pt = 10.0 * 0.7;
    CHECK(dl_sinr_statistical(st, g, Mat::Constant(1, 1, eta), 10.0, 0.3)(0) ==
          doctest::Approx(pt * eta * rho * rho / (pt * eta * rho * 0.6 + 1)));
    CHECK(dl_sinr_statistical(st, g, Mat::Constant(1, 1, eta), 10.0, 1.0)(0) == 0.0);
}

TEST_CASE("downlink SINR against simulated moments") {
    for (std::uint64_t seed : {11, 12, 13}) {
        oracle::Instance in = instance(seed, 3, 2);
        Lib l = lib(in);
        Vec cf = dl_sinr_statistical(l.st, l.g, in.eta, 4.0, 0.25);
        auto band = oracle::dl_sinr_band(in, 3.0, 30000, 500 + seed);
        for (int k = 0; k < 2; ++k) CHECK(band[k].contains(cf(k)));
    }
}

TEST_CASE("rate formulas by substitution") {
    ProtocolSplit s = ProtocolSplit::make(2, false, 0.0, 0.0, 196);
    s.tau_d = 98;
    s.tau_u = 96;
    CHECK(dl_rate(0.0, s) == 0.0);
    CHECK(dl_rate(1.0, s) == doctest::Approx(0.5));
    ProtocolSplit ts = ProtocolSplit::make(2, false, 1.0, 0.0);
    CHECK(dl_rate(5.0, ts) == 0.0);
    ProtocolSplit u = ProtocolSplit::make(2, false, 0.0, 0.0, 196);
    u.tau_u = 49;
    u.tau_d = 145;
    CHECK(ul_rate(3.0, u) == doctest::Approx(0.5));
    CHECK(ul_rate(0.0, u) == 0.0);
    u.tau_u = 0;
    CHECK(ul_rate(3.0, u) == 0.0);
}

TEST_CASE("uplink transmit power and gating") {
    UplinkEnergyBudget b;
    ProtocolSplit s = ProtocolSplit::make(2, false, 0.5, 0.5, 196);
    CHECK(ul_transmit_power(0.0, b, s) == 0.0);
    s.tau_u = 10;
    s.tau_d = 184;
    CHECK(ul_transmit_power(1.0, b, s) == doctest::Approx(0.085));
    b.e_min_pilot = 0.5;  // more than (1 - kappa) of the total: silent
    CHECK(ul_transmit_power(1.0, b, s) == 0.0);
    b.literal_gating = true;
    CHECK(ul_transmit_power(1.0, b, s) == doctest::Approx(0.085));
    UplinkEnergyBudget bad;
    bad.e_remaining = -1;
    CHECK_THROWS(ul_transmit_power(1.0, bad, s));
}

TEST_CASE("uplink power from the received-power identity") {
    oracle::Instance in = instance(3, 3, 2);
    Lib l = lib(in);
    ProtocolSplit s = ProtocolSplit::make(2, false, 0.3, 0.6);
    UplinkEnergyBudget b;
    const double p_d = 7.0;
    Vec avg = average_received_power(l.st, l.g, in.eta, p_d);
    for (int k = 0; k < 2; ++k) {
        const double share = s.tau_d * (s.alpha_ts + (1 - s.alpha_ts) * s.theta_ps);
        CHECK(ul_transmit_power(share * avg(k), b, s) ==
              doctest::Approx(omega_factor(b.kappa, s, p_d) * avg(k) / p_d));
    }
}

TEST_CASE("uplink SINR collapses and matches simulation") {
    LargeScaleGains g{Mat::Constant(1, 1, 0.6)};
    EstimationStatistics st = estimation_statistics(g, {1, 2.0});
    CHECK(ul_sinr(st, g, Vec::Constant(1, 3.0), Vec::Zero(1))(0) == 0.0);
    const double rho = st.rho(0, 0);
    CHECK(ul_sinr(st, g, Vec::Constant(1, 3.0), Vec::Constant(1, 0.5))(0) ==
          doctest::Approx(1.5 * rho / (1.5 * 0.6 + 1)));

    for (std::uint64_t seed : {21, 22}) {
        oracle::Instance in = instance(seed, 3, 2);
        Lib l = lib(in);
        Vec pu(2), eu(2);
        pu << 5.0, 2.0;
        eu << 0.3, 0.8;
        Vec cf = ul_sinr(l.st, l.g, pu, eu);
        auto band = oracle::ul_sinr_band(in, pu, eu, 30000, 900 + seed);
        for (int k = 0; k < 2; ++k) CHECK(band[k].contains(cf(k)));
    }
}

TEST_CASE("beamformed downlink pilots") {
    oracle::Instance in = instance(31, 3, 2);
    Lib l = lib(in);
    Rng rng = make_rng(4);
    DownlinkPilotConfig sharp{2, 1e14};
    ChannelRealization ch = draw_channel(l.g, rng);
    ChannelEstimate est = estimate_uplink(ch, {2, 1.0}, rng);
    EffectiveChannel eff = beamform_dl_pilots_and_estimate(ch, est, l.st, in.eta, sharp, rng);
    CHECK(eff.err_diag.cwiseAbs().maxCoeff() < 1e-5);
    CHECK_THROWS_AS(beamform_dl_pilots_and_estimate(ch, est, l.st, in.eta, {1, 1.0}, rng),
                    unsupported_configuration);

    // Moments of the estimate and its error.
    DownlinkPilotConfig dlp{2, 1.5};
    const int n = 40000;
    std::vector<oracle::Running> mean(2), err(2);
    for (int t = 0; t < n; ++t) {
        ChannelRealization c = draw_channel(l.g, rng);
        ChannelEstimate e = estimate_uplink(c, {2, 1.0}, rng);
        EffectiveChannel f = beamform_dl_pilots_and_estimate(c, e, l.st, in.eta, dlp, rng);
        for (int k = 0; k < 2; ++k) {
            mean[k].add(f.a_hat_diag(k).real());
            err[k].add(std::norm(f.err_diag(k)));
        }
    }
    for (int k = 0; k < 2; ++k) {
        const double mu = (in.eta.col(k).array().sqrt() * l.st.rho.col(k).array()).sum();
        const double v = (in.eta.col(k).array() * in.zeta.col(k).array() * l.st.rho.col(k).array()).sum();
        CHECK(std::abs(mean[k].mean - mu) < 3 * mean[k].se());
        CHECK(std::abs(err[k].mean - v / (2 * 1.5 * v + 1)) < 3 * err[k].se());
    }
}

TEST_CASE("downlink SINR with pilots") {
    oracle::Instance in = instance(41, 3, 2);
    Lib l = lib(in);
    CHECK(dl_effective_sinr_with_pilots(l.st, l.g, Mat::Zero(3, 2), 5.0, 0.0, {2, 1.0}).maxCoeff() == 0.0);

    // Perfect downlink CSI: estimation error terms vanish.
    Vec sharp = dl_effective_sinr_with_pilots(l.st, l.g, in.eta, 5.0, 0.2, {2, 1e15});
    for (int k = 0; k < 2; ++k) {
        const double mu = (in.eta.col(k).array().sqrt() * l.st.rho.col(k).array()).sum();
        const double v = (in.eta.col(k).array() * in.zeta.col(k).array() * l.st.rho.col(k).array()).sum();
        const double all = in.zeta.col(k).dot((in.eta.array() * l.st.rho.array()).rowwise().sum().matrix());
        const double pt = 4.0;
        CHECK(sharp(k) == doctest::Approx(pt * (mu * mu + v) / (pt * (all - v) + 1)).epsilon(1e-8));
    }

    Vec cf = dl_effective_sinr_with_pilots(l.st, l.g, in.eta, 5.0, 0.2, {2, 1.5});
    auto band = oracle::dl_pilot_sinr_band(in, 4.0, 2, 1.5, 30000, 71);
    for (int k = 0; k < 2; ++k) CHECK(band[k].contains(cf(k)));

    ProtocolSplit s = ProtocolSplit::make(2, true, 0.2, 0.0);
    Vec r = dl_rate_with_pilots(l.st, l.g, in.eta, 5.0, s, {2, 1.5});
    Vec g0 = dl_effective_sinr_with_pilots(l.st, l.g, in.eta, 5.0, 0.0, {2, 1.5});
    CHECK(r(0) == doctest::Approx(0.8 * s.tau_dd() / 196.0 * std::log2(1 + g0(0))));
}

TEST_CASE("large-array limits") {
    oracle::Instance in = instance(51, 3, 2);
    Lib l = lib(in);
    ProtocolSplit s = ProtocolSplit::make(2, false, 0.2, 0.3);
    HarvesterParams p;
    AsymptoticMetrics z = asymptotic_metrics(l.st, Mat::Zero(3, 2), 5.0, s, p, 1e-12);
    CHECK(z.received_power.maxCoeff() == 0.0);
    CHECK(z.harvested_energy.maxCoeff() == 0.0);
    AsymptoticMetrics a = asymptotic_metrics(l.st, in.eta, 5.0, s, p, 1e-12);
    for (int k = 0; k < 2; ++k) CHECK(a.sinr(k) == doctest::Approx((1 - 0.3) * a.received_power(k)));
}
