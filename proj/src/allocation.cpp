#include "swipt/allocation.hpp"

#include <ostream>

namespace swipt {

std::string to_string(PolicyTag tag) {
    switch (tag) {
        case PolicyTag::uniform: return "uniform";
        case PolicyTag::maxmin_energy: return "maxmin-energy";
        case PolicyTag::maxmin_rate: return "maxmin-rate";
        case PolicyTag::maxmin_joint: return "maxmin-joint";
        case PolicyTag::asymptotic_moop: return "asymptotic-moop";
    }
    return "unknown";
}

double PowerAllocation::dl_constraint_residual(const EstimationStatistics& stats) const {
    return (eta_dl.array() * stats.rho.array()).rowwise().sum().maxCoeff() - 1.0;
}

double PowerAllocation::ul_constraint_residual(const EstimationStatistics& stats) const {
    return (stats.rho * eta_ul).maxCoeff() - 1.0;
}

void write_allocation_csv(std::ostream& os, const PowerAllocation& alloc) {
    os << "m,k,eta\n";
    os.precision(17);
    for (int m = 0; m < alloc.eta_dl.rows(); ++m)
        for (int k = 0; k < alloc.eta_dl.cols(); ++k) os << m << ',' << k << ',' << alloc.eta_dl(m, k) << '\n';
    for (int k = 0; k < alloc.eta_ul.size(); ++k) os << "ul," << k << ',' << alloc.eta_ul(k) << '\n';
}

}  // namespace swipt
