#pragma once

#include "swipt/energy.hpp"

namespace swipt {

struct DownlinkPilotConfig {
    int tau_pd = 1;
    double pilot_power_Ppd = 1.0;

    void validate(int k) const;
};

// Effective downlink coefficients a_ki = sum_m sqrt(eta_mi) h_mk conj(h_hat_mi).
struct EffectiveChannel {
    CMat a;           // K x K, a(k, i) = a_ki
    CVec a_hat_diag;  // MMSE estimates of a_kk from beamformed pilots
    Vec v_diag;       // v_kk = sum_m eta_mk zeta_mk rho_mk
    CVec err_diag;    // a_kk - a_hat_kk
};

struct UplinkEnergyBudget {
    double e_remaining = 0.0;
    double e_min_pilot = 0.0;
    double kappa = 0.85;
    // false: a user is silent when E_min > (1 - kappa) E_tot; true: the literal reverse reading.
    bool literal_gating = false;

    void validate() const;
    bool permits(double e_total) const;
};

struct AsymptoticMetrics {
    Vec received_power;    // normalized
    Vec sinr;
    Vec rate;              // bits/s/Hz
    Vec harvested_energy;  // W x symbols
};

// P~ (sum_m sqrt(eta_mk) rho_mk)^2 / (P~ sum_m zeta_mk sum_i eta_mi rho_mi + 1), P~ = P_d (1 - theta).
Vec dl_sinr_statistical(const EstimationStatistics& stats, const LargeScaleGains& gains, const Mat& eta,
                        double p_d, double theta);

double dl_rate(double sinr, const ProtocolSplit& split);
Vec dl_rate(const Vec& sinr, const ProtocolSplit& split);

EffectiveChannel beamform_dl_pilots_and_estimate(const ChannelRealization& channel,
                                                 const ChannelEstimate& estimate,
                                                 const EstimationStatistics& stats, const Mat& eta,
                                                 const DownlinkPilotConfig& dlp, Rng& rng);

// Expected SINR over the pilot-based estimate, used inside the Jensen rate bound.
Vec dl_effective_sinr_with_pilots(const EstimationStatistics& stats, const LargeScaleGains& gains,
                                  const Mat& eta, double p_d, double theta, const DownlinkPilotConfig& dlp);

// ((1 - alpha) tau_dd / tau_c) log2(1 + E[gamma_kd]).
Vec dl_rate_with_pilots(const EstimationStatistics& stats, const LargeScaleGains& gains, const Mat& eta,
                        double p_d, const ProtocolSplit& split, const DownlinkPilotConfig& dlp);

// Instantaneous SINR given the user's estimate, for Monte-Carlo rates.
Vec dl_sinr_given_estimate(const EffectiveChannel& eff, const EstimationStatistics& stats,
                           const LargeScaleGains& gains, const Mat& eta, double p_d, double theta,
                           const DownlinkPilotConfig& dlp);

double omega_factor(double kappa, const ProtocolSplit& split, double p_d);

// kappa (E_rem + E_harv) / tau_u, or zero when the budget forbids transmission.
double ul_transmit_power(double harvested, const UplinkEnergyBudget& budget, const ProtocolSplit& split);

// P_uk eta_k (sum_m rho_mk)^2 / (sum_i P_ui eta_i sum_m rho_mk zeta_mi + sum_m rho_mk).
Vec ul_sinr(const EstimationStatistics& stats, const LargeScaleGains& gains, const Vec& p_u, const Vec& eta_u);

double ul_rate(double sinr, const ProtocolSplit& split);
Vec ul_rate(const Vec& sinr, const ProtocolSplit& split);

// Large-M limits; noise_w converts normalized received power to watts for the harvester.
AsymptoticMetrics asymptotic_metrics(const EstimationStatistics& stats, const Mat& eta, double p_d,
                                     const ProtocolSplit& split, const HarvesterParams& params,
                                     double noise_w);

}  // namespace swipt
