#pragma once

#include "swipt/topology.hpp"

namespace swipt {

struct ChannelRealization {
    CMat h;        // M x K, h = sqrt(zeta) .* h_tilde
    CMat h_tilde;  // M x K, i.i.d. CN(0, 1)
    Mat zeta;      // gains the draw was scaled with
};

struct UplinkPilotConfig {
    int tau_p = 1;               // symbols
    double pilot_power_Pp = 1.0; // normalized to unit noise

    void validate(int k) const;
};

struct EstimationStatistics {
    Mat c;    // MMSE coefficients
    Mat rho;  // E|h_hat|^2

    int m() const { return static_cast<int>(rho.rows()); }
    int k() const { return static_cast<int>(rho.cols()); }
};

struct ChannelEstimate {
    CMat h_hat;
    CMat error;  // h - h_hat
};

ChannelRealization draw_channel(const LargeScaleGains& gains, Rng& rng);
ChannelRealization draw_channel(const LargeScaleGains& gains, std::uint64_t rng_seed);

EstimationStatistics estimation_statistics(const LargeScaleGains& gains, const UplinkPilotConfig& cfg);

// Projected pilot statistic y = sqrt(tau_p Pp) h + n, then h_hat = c y.
ChannelEstimate estimate_uplink(const ChannelRealization& channel, const UplinkPilotConfig& cfg, Rng& rng);
ChannelEstimate estimate_uplink(const ChannelRealization& channel, const UplinkPilotConfig& cfg,
                                std::uint64_t rng_seed);

}  // namespace swipt
