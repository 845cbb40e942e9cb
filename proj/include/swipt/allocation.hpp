#pragma once

#include "swipt/channel.hpp"

#include <iosfwd>
#include <string>

namespace swipt {

enum class PolicyTag { uniform, maxmin_energy, maxmin_rate, maxmin_joint, asymptotic_moop };

std::string to_string(PolicyTag tag);

struct PowerAllocation {
    Mat eta_dl;  // M x K, downlink coefficients
    Vec eta_ul;  // K, uplink coefficients
    PolicyTag policy_tag = PolicyTag::uniform;

    // max_m sum_k eta_mk rho_mk - 1, negative when the per-AP budget holds.
    double dl_constraint_residual(const EstimationStatistics& stats) const;
    // max_m sum_k eta_k rho_mk - 1 for the uplink coefficients.
    double ul_constraint_residual(const EstimationStatistics& stats) const;
};

void write_allocation_csv(std::ostream& os, const PowerAllocation& alloc);

}  // namespace swipt
