#pragma once

#include "swipt/allocation.hpp"

#include <cmath>

namespace swipt {

// Logistic rectifier curve. Powers in watts.
struct HarvesterParams {
    double lambda_sat = 0.02;    // W
    double mu_slope = 6.4e9;     // 1/W
    double omega_turn = 2.9e-6;  // W

    double nu_offset() const { return 1.0 / (1.0 + std::exp(mu_slope * omega_turn)); }
    void validate() const;

    // mu = 6400 per microwatt, omega = 2.9 microwatt (default).
    static HarvesterParams microwatt_units() { return {}; }
    // mu = 6400 per watt taken at face value.
    static HarvesterParams face_value_units() { return {0.02, 6400.0, 2.9e-6}; }
};

struct ProtocolSplit {
    double alpha_ts = 0.0;
    double theta_ps = 0.0;
    int tau_c = 196;
    int tau_p = 1;
    int tau_pd = 0;
    int tau_d = 97;
    int tau_u = 98;

    // tau_p = K, tau_pd = K with DL pilots, remainder shared equally by DL and UL.
    static ProtocolSplit make(int k, bool dl_pilots, double alpha, double theta, int tau_c = 196);
    void validate() const;
    int tau_dd() const { return tau_c - (tau_p + tau_pd + tau_u); }
};

enum class SymbolModel { unit_modulus, gaussian };

template <class T>
T eh_transfer(T p, const HarvesterParams& params) {
    using std::exp;
    using std::expm1;
    if (p < T(0)) throw std::invalid_argument("eh_transfer: negative input power");
    // lambda (1 - e^{-mu P}) / (1 + e^{-mu (P - omega)}); overflow of the
    // denominator correctly drives the output to zero.
    T num = -expm1(-params.mu_slope * p);
    T den = T(1) + exp(params.mu_slope * (params.omega_turn - p));
    T v = params.lambda_sat * num / den;
    return v > T(0) ? v : T(0);
}

// Closed-form inverse: x = e^{-mu P} solves psi (1 + x e^{mu omega}) = lambda (1 - x).
double eh_inverse(double e_target, const HarvesterParams& params);

inline double linear_eh(double p, double efficiency = 0.9) { return efficiency * p; }

CVec draw_symbols(int k, Rng& rng, SymbolModel model = SymbolModel::unit_modulus);

// P_k = P_d |sum_m sum_i sqrt(eta_mi) h_mk conj(h_hat_mi) q_i|^2, normalized units.
Vec instantaneous_received_power(const ChannelRealization& channel, const ChannelEstimate& estimate,
                                 const Mat& eta, double p_d, const CVec& symbols);

// alpha tau_d Psi(P) + (1 - alpha) tau_d Psi(theta P); p_received_w in watts.
double instantaneous_harvested_energy(double p_received_w, const ProtocolSplit& split,
                                      const HarvesterParams& params);

// E[P_k] = P_d [(sum_m sqrt(eta_mk) rho_mk)^2 + sum_m zeta_mk sum_i eta_mi rho_mi].
Vec average_received_power(const EstimationStatistics& stats, const LargeScaleGains& gains, const Mat& eta,
                           double p_d);

// Jensen upper bound on the mean harvested energy; avg_power_w in watts.
double average_harvested_energy_ub(double avg_power_w, const ProtocolSplit& split,
                                   const HarvesterParams& params);

}  // namespace swipt
