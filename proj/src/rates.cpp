#include "swipt/rates.hpp"

#include <cmath>

namespace swipt {

namespace {

void check_shapes(const EstimationStatistics& stats, const LargeScaleGains& gains, const Mat& eta) {
    require(eta.rows() == stats.rho.rows() && eta.cols() == stats.rho.cols(), "rates: eta shape");
    require(gains.zeta.rows() == stats.rho.rows() && gains.zeta.cols() == stats.rho.cols(), "rates: gains shape");
}

Vec coherent_gain(const EstimationStatistics& stats, const Mat& eta) {
    return (eta.array().sqrt() * stats.rho.array()).colwise().sum().transpose();
}

// Column k: sum_m zeta_mk sum_i eta_mi rho_mi.
Vec total_interference(const EstimationStatistics& stats, const LargeScaleGains& gains, const Mat& eta) {
    Vec per_ap = (eta.array() * stats.rho.array()).rowwise().sum();
    return gains.zeta.transpose() * per_ap;
}

Vec v_kk(const EstimationStatistics& stats, const LargeScaleGains& gains, const Mat& eta) {
    return (eta.array() * gains.zeta.array() * stats.rho.array()).colwise().sum().transpose();
}

}  // namespace

void DownlinkPilotConfig::validate(int k) const {
    require(pilot_power_Ppd > 0, "downlink pilots: power must be positive");
    if (tau_pd < k) throw unsupported_configuration("downlink pilots: tau_pd < K");
}

void UplinkEnergyBudget::validate() const {
    require(kappa > 0 && kappa < 1, "uplink budget: kappa outside (0, 1)");
    require(e_remaining >= 0 && e_min_pilot >= 0, "uplink budget: negative energy");
}

bool UplinkEnergyBudget::permits(double e_total) const {
    bool short_reserve = e_min_pilot > (1 - kappa) * e_total;
    return literal_gating ? short_reserve : !short_reserve;
}

Vec dl_sinr_statistical(const EstimationStatistics& stats, const LargeScaleGains& gains, const Mat& eta,
                        double p_d, double theta) {
    check_shapes(stats, gains, eta);
    require(theta >= 0 && theta <= 1, "dl sinr: theta outside [0, 1]");
    const double pt = p_d * (1 - theta);
    Vec num = pt * coherent_gain(stats, eta).array().square();
    Vec den = (pt * total_interference(stats, gains, eta).array() + 1.0).matrix();
    return num.cwiseQuotient(den);
}

double dl_rate(double sinr, const ProtocolSplit& split) {
    require(sinr >= 0, "dl rate: negative sinr");
    return (1 - split.alpha_ts) * split.tau_d / split.tau_c * std::log2(1 + sinr);
}

Vec dl_rate(const Vec& sinr, const ProtocolSplit& split) {
    return sinr.unaryExpr([&](double g) { return dl_rate(g, split); });
}

EffectiveChannel beamform_dl_pilots_and_estimate(const ChannelRealization& channel,
                                                 const ChannelEstimate& estimate,
                                                 const EstimationStatistics& stats, const Mat& eta,
                                                 const DownlinkPilotConfig& dlp, Rng& rng) {
    const int K = static_cast<int>(channel.h.cols());
    dlp.validate(K);
    LargeScaleGains g{channel.zeta};
    check_shapes(stats, g, eta);
    EffectiveChannel eff;
    CMat precoder = eta.array().sqrt().cast<cplx>() * estimate.h_hat.conjugate().array();
    eff.a = channel.h.transpose() * precoder;
    eff.v_diag = v_kk(stats, g, eta);
    Vec mean = coherent_gain(stats, eta);
    const double tp = dlp.tau_pd * dlp.pilot_power_Ppd;
    const double s = std::sqrt(tp);
    eff.a_hat_diag.resize(K);
    for (int k = 0; k < K; ++k) {
        cplx y = s * eff.a(k, k) + complex_normal(rng);
        eff.a_hat_diag(k) = (s * eff.v_diag(k) * y + mean(k)) / (tp * eff.v_diag(k) + 1.0);
    }
    eff.err_diag = eff.a.diagonal() - eff.a_hat_diag;
    return eff;
}

Vec dl_effective_sinr_with_pilots(const EstimationStatistics& stats, const LargeScaleGains& gains,
                                  const Mat& eta, double p_d, double theta, const DownlinkPilotConfig& dlp) {
    check_shapes(stats, gains, eta);
    dlp.validate(static_cast<int>(eta.cols()));
    const double pt = p_d * (1 - theta);
    const double tp = dlp.tau_pd * dlp.pilot_power_Ppd;
    Vec v = v_kk(stats, gains, eta);
    Vec err = v.array() / (tp * v.array() + 1.0);
    Vec a_hat_sq = coherent_gain(stats, eta).array().square() + v.array() - err.array();
    Vec others = total_interference(stats, gains, eta) - v;
    Vec num = pt * a_hat_sq;
    Vec den = (pt * err.array() + pt * others.array() + 1.0).matrix();
    return num.cwiseQuotient(den);
}

Vec dl_rate_with_pilots(const EstimationStatistics& stats, const LargeScaleGains& gains, const Mat& eta,
                        double p_d, const ProtocolSplit& split, const DownlinkPilotConfig& dlp) {
    if (split.tau_dd() <= 0) throw std::invalid_argument("dl rate with pilots: empty data slot");
    Vec g = dl_effective_sinr_with_pilots(stats, gains, eta, p_d, split.theta_ps, dlp);
    const double pre = (1 - split.alpha_ts) * split.tau_dd() / split.tau_c;
    return g.unaryExpr([&](double x) { return pre * std::log2(1 + x); });
}

Vec dl_sinr_given_estimate(const EffectiveChannel& eff, const EstimationStatistics& stats,
                           const LargeScaleGains& gains, const Mat& eta, double p_d, double theta,
                           const DownlinkPilotConfig& dlp) {
    const double pt = p_d * (1 - theta);
    const double tp = dlp.tau_pd * dlp.pilot_power_Ppd;
    Vec v = v_kk(stats, gains, eta);
    Vec err = v.array() / (tp * v.array() + 1.0);
    Vec others = total_interference(stats, gains, eta) - v;
    Vec num = pt * eff.a_hat_diag.cwiseAbs2();
    Vec den = (pt * err.array() + pt * others.array() + 1.0).matrix();
    return num.cwiseQuotient(den);
}

double omega_factor(double kappa, const ProtocolSplit& split, double p_d) {
    return kappa * split.tau_d * (split.alpha_ts + (1 - split.alpha_ts) * split.theta_ps) * p_d / split.tau_u;
}

double ul_transmit_power(double harvested, const UplinkEnergyBudget& budget, const ProtocolSplit& split) {
    budget.validate();
    if (harvested < 0) throw std::invalid_argument("ul power: negative harvested energy");
    if (split.tau_u <= 0) return 0.0;
    const double total = budget.e_remaining + harvested;
    if (!budget.permits(total)) return 0.0;
    return budget.kappa * total / split.tau_u;
}

Vec ul_sinr(const EstimationStatistics& stats, const LargeScaleGains& gains, const Vec& p_u, const Vec& eta_u) {
    const Eigen::Index K = stats.rho.cols();
    require(p_u.size() == K && eta_u.size() == K, "ul sinr: vector sizes");
    require((p_u.array() >= 0).all() && (eta_u.array() >= 0).all(), "ul sinr: negative power");
    Vec pe = p_u.cwiseProduct(eta_u);
    Vec rho_sum = stats.rho.colwise().sum().transpose();
    // cross(k, i) = sum_m rho_mk zeta_mi
    Mat cross = stats.rho.transpose() * gains.zeta;
    Vec num = pe.cwiseProduct(rho_sum.cwiseAbs2());
    Vec den = cross * pe + rho_sum;
    return num.cwiseQuotient(den);
}

double ul_rate(double sinr, const ProtocolSplit& split) {
    require(sinr >= 0, "ul rate: negative sinr");
    return static_cast<double>(split.tau_u) / split.tau_c * std::log2(1 + sinr);
}

Vec ul_rate(const Vec& sinr, const ProtocolSplit& split) {
    return sinr.unaryExpr([&](double g) { return ul_rate(g, split); });
}

AsymptoticMetrics asymptotic_metrics(const EstimationStatistics& stats, const Mat& eta, double p_d,
                                     const ProtocolSplit& split, const HarvesterParams& params,
                                     double noise_w) {
    AsymptoticMetrics r;
    Vec c = (eta.array().sqrt() * stats.rho.array()).colwise().sum().transpose();
    r.received_power = p_d * c.array().square();
    r.sinr = (1 - split.theta_ps) * r.received_power;
    r.rate = dl_rate(r.sinr, split);
    r.harvested_energy = r.received_power.unaryExpr(
        [&](double p) { return instantaneous_harvested_energy(p * noise_w, split, params); });
    return r;
}

}  // namespace swipt
