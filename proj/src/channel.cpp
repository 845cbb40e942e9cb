#include "swipt/channel.hpp"

#include <cmath>

namespace swipt {

void UplinkPilotConfig::validate(int k) const {
    require(pilot_power_Pp > 0, "uplink pilots: power must be positive");
    if (tau_p < k)
        throw unsupported_configuration("uplink pilots: tau_p < K breaks pilot orthogonality");
}

ChannelRealization draw_channel(const LargeScaleGains& gains, Rng& rng) {
    gains.validate();
    ChannelRealization ch;
    ch.zeta = gains.zeta;
    ch.h_tilde.resize(gains.m(), gains.k());
    for (int k = 0; k < gains.k(); ++k)
        for (int m = 0; m < gains.m(); ++m) ch.h_tilde(m, k) = complex_normal(rng);
    ch.h = gains.zeta.array().sqrt().cast<cplx>() * ch.h_tilde.array();
    return ch;
}

ChannelRealization draw_channel(const LargeScaleGains& gains, std::uint64_t rng_seed) {
    Rng rng = make_rng(rng_seed, 10);
    return draw_channel(gains, rng);
}

EstimationStatistics estimation_statistics(const LargeScaleGains& gains, const UplinkPilotConfig& cfg) {
    gains.validate();
    cfg.validate(gains.k());
    const double tp = cfg.tau_p * cfg.pilot_power_Pp;
    EstimationStatistics s;
    s.c = (std::sqrt(tp) * gains.zeta.array()) / (tp * gains.zeta.array() + 1.0);
    s.rho = std::sqrt(tp) * s.c.array() * gains.zeta.array();
    return s;
}

ChannelEstimate estimate_uplink(const ChannelRealization& channel, const UplinkPilotConfig& cfg, Rng& rng) {
    const int M = static_cast<int>(channel.h.rows()), K = static_cast<int>(channel.h.cols());
    cfg.validate(K);
    const double tp = cfg.tau_p * cfg.pilot_power_Pp;
    const double s = std::sqrt(tp);
    ChannelEstimate e;
    e.h_hat.resize(M, K);
    for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m) {
            const double z = channel.zeta(m, k);
            const double c = s * z / (tp * z + 1.0);
            e.h_hat(m, k) = c * (s * channel.h(m, k) + complex_normal(rng));
        }
    e.error = channel.h - e.h_hat;
    return e;
}

ChannelEstimate estimate_uplink(const ChannelRealization& channel, const UplinkPilotConfig& cfg,
                                std::uint64_t rng_seed) {
    Rng rng = make_rng(rng_seed, 11);
    return estimate_uplink(channel, cfg, rng);
}

}  // namespace swipt
