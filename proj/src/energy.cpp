#include "swipt/energy.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace swipt {

void HarvesterParams::validate() const {
    require(lambda_sat > 0, "harvester: lambda must be positive");
    require(mu_slope > 0, "harvester: mu must be positive");
    require(omega_turn >= 0, "harvester: omega must be non-negative");
}

ProtocolSplit ProtocolSplit::make(int k, bool dl_pilots, double alpha, double theta, int tau_c) {
    ProtocolSplit s;
    s.alpha_ts = alpha;
    s.theta_ps = theta;
    s.tau_c = tau_c;
    s.tau_p = k;
    s.tau_pd = dl_pilots ? k : 0;
    int rest = tau_c - s.tau_p - s.tau_pd;
    s.tau_d = rest / 2;
    s.tau_u = rest - s.tau_d;
    s.validate();
    return s;
}

void ProtocolSplit::validate() const {
    require(alpha_ts >= 0 && alpha_ts <= 1, "split: alpha outside [0, 1]");
    require(theta_ps >= 0 && theta_ps <= 1, "split: theta outside [0, 1]");
    require(tau_p >= 0 && tau_pd >= 0 && tau_d >= 0 && tau_u >= 0, "split: negative slot length");
    require(tau_p + tau_pd + tau_d + tau_u == tau_c, "split: slots do not add up to tau_c");
}

double eh_inverse(double e_target, const HarvesterParams& params) {
    params.validate();
    if (e_target < 0) throw std::invalid_argument("eh_inverse: negative target");
    if (e_target >= params.lambda_sat) throw std::out_of_range("eh_inverse: saturation level is unreachable");
    if (e_target == 0) return 0.0;
    const double mu = params.mu_slope;
    // mu P = log(1 + psi e^{mu omega} / lambda) - log(1 - psi / lambda), both in log1p form
    // so small targets keep full precision; r is the log of the first ratio.
    const double r = std::log(e_target / params.lambda_sat) + mu * params.omega_turn;
    const double up = r < 30 ? std::log1p(std::exp(r)) : r + std::log1p(std::exp(-r));
    return (up - std::log1p(-e_target / params.lambda_sat)) / mu;
}

CVec draw_symbols(int k, Rng& rng, SymbolModel model) {
    CVec q(k);
    if (model == SymbolModel::gaussian) {
        for (int i = 0; i < k; ++i) q(i) = complex_normal(rng);
    } else {
        std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
        for (int i = 0; i < k; ++i) q(i) = std::polar(1.0, ph(rng));
    }
    return q;
}

Vec instantaneous_received_power(const ChannelRealization& channel, const ChannelEstimate& estimate,
                                 const Mat& eta, double p_d, const CVec& symbols) {
    const Eigen::Index M = channel.h.rows(), K = channel.h.cols();
    require(estimate.h_hat.rows() == M && estimate.h_hat.cols() == K, "received power: estimate shape");
    require(eta.rows() == M && eta.cols() == K, "received power: eta shape");
    require(symbols.size() == K, "received power: symbol count");
    // Per-AP transmitted signal x_m = sum_i sqrt(eta_mi) conj(h_hat_mi) q_i.
    CVec x = (eta.array().sqrt().cast<cplx>() * estimate.h_hat.conjugate().array()).matrix() * symbols;
    Vec p(K);
    for (Eigen::Index k = 0; k < K; ++k) p(k) = p_d * std::norm((channel.h.col(k).transpose() * x).value());
    return p;
}

double instantaneous_harvested_energy(double p_received_w, const ProtocolSplit& split,
                                      const HarvesterParams& params) {
    if (p_received_w < 0) throw std::invalid_argument("harvested energy: negative power");
    const double a = split.alpha_ts, td = split.tau_d;
    double e = 0.0;
    if (a > 0) e += a * td * eh_transfer(p_received_w, params);
    if (a < 1 && split.theta_ps > 0) e += (1 - a) * td * eh_transfer(split.theta_ps * p_received_w, params);
    return e;
}

Vec average_received_power(const EstimationStatistics& stats, const LargeScaleGains& gains, const Mat& eta,
                           double p_d) {
    require(eta.rows() == stats.rho.rows() && eta.cols() == stats.rho.cols(), "average power: eta shape");
    require(gains.zeta.rows() == stats.rho.rows() && gains.zeta.cols() == stats.rho.cols(),
            "average power: gains shape");
    Vec coherent = (eta.array().sqrt() * stats.rho.array()).colwise().sum().transpose();
    Vec per_ap = (eta.array() * stats.rho.array()).rowwise().sum();  // sum_i eta_mi rho_mi
    Vec spread = gains.zeta.transpose() * per_ap;
    return p_d * (coherent.array().square() + spread.array()).matrix();
}

double average_harvested_energy_ub(double avg_power_w, const ProtocolSplit& split,
                                   const HarvesterParams& params) {
    return instantaneous_harvested_energy(avg_power_w, split, params);
}

}  // namespace swipt
