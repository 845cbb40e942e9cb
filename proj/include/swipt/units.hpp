#pragma once

#include <cmath>

namespace swipt {

// Receiver noise and time base. Formula modules work in powers normalized to
// unit noise; this is the only place that knows about dBm and seconds.
struct LinkBudget {
    double bandwidth_hz = 20e6;
    // -174 + 10 log10(B) + 10 dB noise figure, rounded as used throughout.
    double noise_power_dbm = -91.0;

    double noise_dbm() const { return noise_power_dbm; }
    double noise_w() const { return dbm_to_w(noise_dbm()); }
    double symbol_time_s() const { return 1.0 / bandwidth_hz; }

    // Transmit power in dBm to the unit-noise normalized P_d.
    double normalized_power(double tx_dbm) const { return std::pow(10.0, (tx_dbm - noise_dbm()) / 10.0); }
    double to_watts(double normalized) const { return normalized * noise_w(); }
    // Harvested energy in W x symbols to millijoules.
    double to_mj(double watt_symbols) const { return watt_symbols * symbol_time_s() * 1e3; }

    static double dbm_to_w(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
    static double w_to_dbm(double w) { return 10.0 * std::log10(w * 1e3); }
};

}  // namespace swipt
