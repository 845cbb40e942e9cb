#include "swipt/bisection.hpp"

#include "swipt/common.hpp"

#include <cmath>

namespace swipt {

void BisectionConfig::validate() const {
    require(t_min < t_max, "bisection: t_min must be below t_max");
    require(epsilon > 0, "bisection: epsilon must be positive");
}

int bisection_iteration_bound(const BisectionConfig& cfg) {
    cfg.validate();
    const double r = (cfg.t_max - cfg.t_min) / cfg.epsilon;
    return r <= 1 ? 0 : static_cast<int>(std::ceil(std::log2(r)));
}

BisectionResult bisect_quasiconcave(const std::function<bool(double)>& feasible, const BisectionConfig& cfg) {
    cfg.validate();
    BisectionResult r;
    const bool top = feasible(cfg.t_max);
    if (cfg.check_lower) {
        const bool bottom = feasible(cfg.t_min);
        if (!bottom && top) throw protocol_violation("bisection: t_max feasible while t_min is not");
        if (!bottom) throw std::domain_error("bisection: no feasible target in the bracket");
    }
    if (top) {
        r.t_star = r.t_upper = cfg.t_max;
        return r;
    }
    double lo = cfg.t_min, hi = cfg.t_max;
    while (hi - lo > cfg.epsilon) {
        const double mid = 0.5 * (lo + hi);
        ++r.iterations;
        if (feasible(mid)) lo = mid;
        else hi = mid;
    }
    r.t_star = lo;
    r.t_upper = hi;
    return r;
}

}  // namespace swipt
