#pragma once

#include "swipt/bisection.hpp"
#include "swipt/rates.hpp"
#include "swipt/socp.hpp"

#include <string>
#include <vector>

namespace swipt {

struct PowerControlOptions {
    double sinr_epsilon = 1e-4;    // absolute, on SINR
    double energy_epsilon = 1e-4;  // relative to the energy upper bound
    bool equalize = true;          // per-user fixed-point scaling after bisection
    bool refine_energy = true;     // least total power among max-min energy optima
    // Joint DL/UL stage 1: also impose eta_mk <= 1 as printed.
    bool literal_eta_box = false;
    // Joint DL/UL: uplink power from the printed received-power expression.
    bool printed_uplink_power = false;
    SolverOptions solver;
};

struct MaxminResult {
    PowerAllocation alloc;
    double common_value = 0.0;  // normalized E[P] for energy, SINR for rate
    BisectionConfig bracket;
    int bisection_iterations = 0;
    int solver_calls = 0;
    int solver_failures = 0;
    int solver_iterations = 0;  // total interior-point iterations
    double ops = 0.0;
    double max_violation = 0.0;  // worst solver residual among accepted points
    std::string last_failure;    // diagnostics of the most recent solver failure
};

struct JointResult {
    PowerAllocation alloc;
    double common_energy = 0.0;   // stage 1, normalized E[P]
    double common_ul_sinr = 0.0;  // stage 2
    Vec p_ul;                     // uplink powers, normalized
    MaxminResult stage1, stage2;
};

struct MoopWeights {
    double w_r = 1.0;
    double w_e = 1.0;
    void validate() const;
};

struct MoopResult {
    PowerAllocation alloc;
    double lambda_star = 0.0;  // P_d (min_k sum_m beta_mk rho_mk)^2
    double common_gain = 0.0;  // min_k sum_m beta_mk rho_mk
};

enum class Protocol { TS, PS };

std::string to_string(Protocol p);

struct TradeoffPoint {
    double common_energy = 0.0;  // W x symbols
    double common_rate = 0.0;    // bits/s/Hz
    double split_factor = 0.0;   // alpha (TS) or theta (PS)
    Protocol protocol = Protocol::PS;
};

struct TradeoffCurve {
    std::vector<TradeoffPoint> points;
    Vec energy_per_user_scale;  // E[P_k] in watts behind the energy axis
};

// eta_mk = 1 / sum_k' rho_mk'.
PowerAllocation uniform_allocation(const EstimationStatistics& stats);

MaxminResult maxmin_energy(const EstimationStatistics& stats, const LargeScaleGains& gains, double p_d,
                           const PowerControlOptions& opts = {});

MaxminResult maxmin_rate(const EstimationStatistics& stats, const LargeScaleGains& gains, double p_d, double theta,
                         const PowerControlOptions& opts = {});

JointResult joint_dl_ul(const EstimationStatistics& stats, const LargeScaleGains& gains, double p_d,
                        const ProtocolSplit& split, const UplinkEnergyBudget& budget,
                        const PowerControlOptions& opts = {});

// Stage 2 alone: max-min UL SINR over beta_k for fixed uplink powers.
MaxminResult maxmin_ul_sinr(const EstimationStatistics& stats, const LargeScaleGains& gains, const Vec& p_ul,
                            const PowerControlOptions& opts = {});

// Uplink coefficients shared by all users at the largest level the AP budget admits.
Vec uniform_ul_coefficients(const EstimationStatistics& stats);

MoopResult asymptotic_moop(const EstimationStatistics& stats, double p_d, const MoopWeights& weights = {},
                           const PowerControlOptions& opts = {});

// theta swept over grid_size points; energy from the max-min energy optimum,
// rate from max-min SINR solved at every theta. noise_w maps to watts.
TradeoffCurve tradeoff_curve_ps(const EstimationStatistics& stats, const LargeScaleGains& gains, double p_d,
                                const HarvesterParams& params, const ProtocolSplit& split, int grid_size,
                                double noise_w, const PowerControlOptions& opts = {});

TradeoffCurve tradeoff_curve_ts(const EstimationStatistics& stats, const LargeScaleGains& gains, double p_d,
                                const HarvesterParams& params, const ProtocolSplit& split, int grid_size,
                                double noise_w, const PowerControlOptions& opts = {});

// Same sweeps from precomputed optima, so callers can reuse solver work.
TradeoffCurve tradeoff_curve_ts_from(double common_power_w, double common_sinr, const HarvesterParams& params,
                                     const ProtocolSplit& split, int grid_size);

// Split factor recovered from a point on each curve.
double recover_theta_from_energy(double energy, double common_power_w, const HarvesterParams& params,
                                 const ProtocolSplit& split);
double recover_theta_from_rate(double rate, const EstimationStatistics& stats, const LargeScaleGains& gains,
                               const Mat& eta, double p_d, const ProtocolSplit& split);
double recover_alpha_from_energy(double energy, double common_power_w, const HarvesterParams& params,
                                 const ProtocolSplit& split);

}  // namespace swipt
