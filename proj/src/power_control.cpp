#include "swipt/power_control.hpp"

#include <algorithm>
#include <cmath>

namespace swipt {

namespace {

struct Index {
    int M, K;
    int operator()(int m, int k) const { return k * M + m; }
};

// Solver call bookkeeping shared by the bisection oracles.
struct Tally {
    MaxminResult* r;
    Vec last_point;
    bool check(const SocProgram& prog, const SolverOptions& opts) {
        FeasibilityResult f = solve_feasibility(prog, opts);
        ++r->solver_calls;
        r->solver_iterations += f.iterations;
        r->ops += f.arithmetic_ops_estimate;
        if (f.status == SolveStatus::numerical_failure) {
            ++r->solver_failures;
            r->last_failure = f.diagnostics;
            return false;
        }
        if (f.status != SolveStatus::feasible) return false;
        last_point = f.point;
        r->max_violation = std::max(r->max_violation, f.max_violation);
        return true;
    }
};

// Scale each AP row down so that sum_k eta_mk rho_mk <= 1 holds exactly.
void enforce_ap_budget(Mat& eta, const Mat& rho) {
    for (Eigen::Index m = 0; m < eta.rows(); ++m) {
        const double load = (eta.row(m).array() * rho.row(m).array()).sum();
        if (load > 1.0) eta.row(m) /= load * (1 + 1e-15);
    }
}

Mat eta_from_x(const Vec& x, const Mat& rho) {
    const int M = static_cast<int>(rho.rows()), K = static_cast<int>(rho.cols());
    Index ix{M, K};
    Mat eta = Mat::Zero(M, K);
    for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m) {
            const double v = std::max(0.0, x(ix(m, k)));
            eta(m, k) = rho(m, k) > 0 ? v * v / rho(m, k) : 0.0;
        }
    enforce_ap_budget(eta, rho);
    return eta;
}

Mat eta_from_y(const Vec& y, const Mat& rho) {
    const int M = static_cast<int>(rho.rows()), K = static_cast<int>(rho.cols());
    Index ix{M, K};
    Mat eta = Mat::Zero(M, K);
    for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m)
            eta(m, k) = rho(m, k) > 0 ? std::max(0.0, y(ix(m, k))) / rho(m, k) : 0.0;
    enforce_ap_budget(eta, rho);
    return eta;
}

// Coherent amplitude A_k = sum_m sqrt(eta_mk) rho_mk and spread S(k, i) = sum_m zeta_mk eta_mi rho_mi.
void coherent_and_spread(const EstimationStatistics& stats, const LargeScaleGains& gains, const Mat& eta, Vec& a,
                         Mat& s) {
    a = (eta.array().sqrt() * stats.rho.array()).colwise().sum().transpose();
    s = gains.zeta.transpose() * (eta.array() * stats.rho.array()).matrix();
}

// Per-user scaling p_k in [0, 1] that brings every user to the same value t.
// Returns false when the linear system has no admissible solution.
bool solve_scaling(const Mat& lhs, const Vec& rhs, Vec& p) {
    p = lhs.partialPivLu().solve(rhs);
    if (!p.allFinite()) return false;
    const double tol = 1e-9;
    if ((p.array() < -tol).any() || (p.array() > 1 + tol).any()) return false;
    p = p.cwiseMax(0.0).cwiseMin(1.0);
    return true;
}

double min_ratio_sum(const Mat& rho, const Mat& zeta, int k) {
    double s = 0.0;
    for (Eigen::Index m = 0; m < rho.rows(); ++m)
        if (zeta(m, k) > 0) s += rho(m, k) / zeta(m, k);
    return s;
}

void check_inputs(const EstimationStatistics& stats, const LargeScaleGains& gains, double p_d) {
    require(stats.rho.size() > 0, "power control: empty statistics");
    require(gains.zeta.rows() == stats.rho.rows() && gains.zeta.cols() == stats.rho.cols(),
            "power control: gains shape");
    require(p_d > 0 && std::isfinite(p_d), "power control: P_d must be positive");
}

MaxminResult maxmin_energy_impl(const EstimationStatistics& stats, const LargeScaleGains& gains, double p_d,
                                const PowerControlOptions& opts, bool eta_box) {
    check_inputs(stats, gains, p_d);
    const Mat& rho = stats.rho;
    const Mat& zeta = gains.zeta;
    const int M = stats.m(), K = stats.k();
    Index ix{M, K};
    const int MK = M * K, n = 2 * MK + K;
    const int z0 = MK, w0 = 2 * MK;

    MaxminResult r;
    r.alloc.policy_tag = PolicyTag::maxmin_energy;

    Vec s(K), zeta_sum(K);
    for (int k = 0; k < K; ++k) {
        s(k) = std::pow(rho.col(k).cwiseSqrt().sum(), 2);
        zeta_sum(k) = zeta.col(k).sum();
    }
    // Upper bound on min_k E[P_k] / P_d; targets are normalized by it.
    const double U = (s + zeta_sum).minCoeff();
    require(U > 0, "maxmin energy: all users have zero gain");

    PowerAllocation uni = uniform_allocation(stats);
    const double start = average_received_power(stats, gains, uni.eta_dl, p_d).minCoeff() / (p_d * U);

    auto build = [&](double tau) {
        SocProgram prog(n);
        for (int k = 0; k < K; ++k)
            for (int m = 0; m < M; ++m) {
                const double ub = eta_box ? std::min(1.0, rho(m, k)) : 1.0;
                prog.set_bounds(ix(m, k), 0.0, ub);
                prog.set_bounds(z0 + ix(m, k), 0.0, 1.0);
            }
        for (int k = 0; k < K; ++k) prog.set_bounds(w0 + k, 0.0, 1.0);
        for (int m = 0; m < M; ++m) {
            SpVec g(n);
            for (int k = 0; k < K; ++k) g.insert(ix(m, k)) = 1.0;
            prog.add_linear(std::move(g), 1.0);
        }
        // z_mk^2 <= y_mk w_k
        for (int k = 0; k < K; ++k)
            for (int m = 0; m < M; ++m) {
                if (rho(m, k) <= 0) continue;
                SpMat A(2, n);
                A.insert(0, z0 + ix(m, k)) = 2.0;
                A.insert(1, ix(m, k)) = 1.0;
                A.insert(1, w0 + k) = -1.0;
                SpVec c(n);
                c.insert(ix(m, k)) = 1.0;
                c.insert(w0 + k) = 1.0;
                prog.add_cone(std::move(A), Vec::Zero(2), std::move(c), 0.0);
            }
        for (int k = 0; k < K; ++k) {
            const double rs = std::sqrt(s(k));
            // w_k <= sum_m sqrt(rho_mk / s_k) z_mk
            SpVec g(n);
            for (int m = 0; m < M; ++m)
                if (rho(m, k) > 0) g.insert(z0 + ix(m, k)) = -std::sqrt(rho(m, k)) / rs;
            g.insert(w0 + k) = 1.0;
            prog.add_linear(std::move(g), 0.0);
            // tau <= (s_k w_k + sum_m zeta_mk sum_i y_mi) / U
            SpVec e(n);
            for (int i = 0; i < K; ++i)
                for (int m = 0; m < M; ++m)
                    if (zeta(m, k) > 0) e.insert(ix(m, i)) = -zeta(m, k) / U;
            e.insert(w0 + k) = -s(k) / U;
            prog.add_linear(std::move(e), -tau);
        }
        return prog;
    };

    Tally tally{&r, {}};
    r.bracket = {std::min(start, 1.0 - opts.energy_epsilon), 1.0, opts.energy_epsilon, false};
    if (r.bracket.t_min < 0) r.bracket.t_min = 0;
    BisectionResult b = bisect_quasiconcave([&](double tau) { return tally.check(build(tau), opts.solver); },
                                            r.bracket);
    r.bisection_iterations = b.iterations;

    Mat eta;
    if (tally.last_point.size() == 0) {
        // No midpoint was certified; the uniform allocation attains t_min.
        eta = uni.eta_dl;
    } else {
        Vec point = tally.last_point;
        if (opts.refine_energy) {
            SocProgram prog = build(b.t_star);
            Vec obj = Vec::Zero(n);
            obj.head(MK).setConstant(-1.0);
            prog.objective = obj;
            FeasibilityResult f = solve_maximize(prog, opts.solver);
            ++r.solver_calls;
            r.solver_iterations += f.iterations;
            r.ops += f.arithmetic_ops_estimate;
            if (f.status == SolveStatus::feasible) {
                point = f.point;
            } else {
                ++r.solver_failures;
                r.last_failure = "refinement: " + to_string(f.status) + " " + f.diagnostics;
            }
        }
        eta = eta_from_y(point.head(MK), rho);
    }
    if (eta_box) eta = eta.cwiseMin(1.0);

    if (opts.equalize) {
        Vec a;
        Mat sp;
        coherent_and_spread(stats, gains, eta, a, sp);
        const double t = (a.array().square().matrix() + sp.rowwise().sum()).minCoeff();
        Mat lhs = sp;
        lhs.diagonal() += a.cwiseAbs2();
        Vec p;
        if (solve_scaling(lhs, Vec::Constant(K, t), p))
            for (int k = 0; k < K; ++k) eta.col(k) *= p(k);
    }
    r.alloc.eta_dl = eta;
    r.alloc.eta_ul = uniform_ul_coefficients(stats);
    r.common_value = average_received_power(stats, gains, eta, p_d).minCoeff() / p_d;
    return r;
}

}  // namespace

std::string to_string(Protocol p) { return p == Protocol::TS ? "TS" : "PS"; }

void MoopWeights::validate() const {
    require(w_r >= 0 && w_e >= 0 && w_r + w_e > 0, "moop weights: need non-negative weights, not both zero");
}

PowerAllocation uniform_allocation(const EstimationStatistics& stats) {
    require(stats.rho.size() > 0, "uniform allocation: empty statistics");
    PowerAllocation a;
    a.policy_tag = PolicyTag::uniform;
    Vec load = stats.rho.rowwise().sum();
    a.eta_dl = Mat::Zero(stats.m(), stats.k());
    for (int m = 0; m < stats.m(); ++m)
        if (load(m) > 0) a.eta_dl.row(m).setConstant(1.0 / load(m));
    a.eta_ul = uniform_ul_coefficients(stats);
    return a;
}

Vec uniform_ul_coefficients(const EstimationStatistics& stats) {
    const double load = stats.rho.rowwise().sum().maxCoeff();
    const double v = load > 1.0 ? 1.0 / load : 1.0;
    return Vec::Constant(stats.k(), v);
}

MaxminResult maxmin_energy(const EstimationStatistics& stats, const LargeScaleGains& gains, double p_d,
                           const PowerControlOptions& opts) {
    return maxmin_energy_impl(stats, gains, p_d, opts, false);
}

MaxminResult maxmin_rate(const EstimationStatistics& stats, const LargeScaleGains& gains, double p_d, double theta,
                         const PowerControlOptions& opts) {
    check_inputs(stats, gains, p_d);
    require(theta >= 0 && theta <= 1, "maxmin rate: theta outside [0, 1]");
    const Mat& rho = stats.rho;
    const Mat& zeta = gains.zeta;
    const int M = stats.m(), K = stats.k();
    Index ix{M, K};
    const int n = M * K;
    const double pt = p_d * (1 - theta);

    MaxminResult r;
    PowerAllocation uni = uniform_allocation(stats);
    r.alloc = uni;
    r.alloc.policy_tag = PolicyTag::maxmin_rate;
    if (pt <= 0) return r;  // all power goes to the harvester

    // SINR_k < P~ (sum_m sqrt(rho_mk))^2 and, by Cauchy-Schwarz, < sum_m rho_mk / zeta_mk.
    double t_max = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
        const double coh = pt * std::pow(rho.col(k).cwiseSqrt().sum(), 2);
        t_max = std::min({t_max, coh, min_ratio_sum(rho, zeta, k)});
    }
    const double t_min = dl_sinr_statistical(stats, gains, uni.eta_dl, p_d, theta).minCoeff();
    r.common_value = t_min;
    if (!(t_max > t_min)) return r;

    auto build = [&](double gamma) {
        SocProgram prog(n);
        for (int j = 0; j < n; ++j) prog.set_bounds(j, 0.0, 1.0);
        for (int m = 0; m < M; ++m) {
            SpMat A(K, n);
            for (int k = 0; k < K; ++k) A.insert(k, ix(m, k)) = 1.0;
            prog.add_cone(std::move(A), Vec::Zero(K), SpVec(n), 1.0);
        }
        // ||[sqrt(P~ zeta_mk) x_mi ; 1]|| <= sqrt(P~ / gamma) sum_m sqrt(rho_mk) x_mk
        const double cg = std::sqrt(pt / gamma);
        for (int k = 0; k < K; ++k) {
            SpMat A(n + 1, n);
            A.reserve(Eigen::VectorXi::Constant(n, 1));
            for (int i = 0; i < K; ++i)
                for (int m = 0; m < M; ++m)
                    if (zeta(m, k) > 0) A.insert(ix(m, i), ix(m, i)) = std::sqrt(pt * zeta(m, k));
            Vec b = Vec::Zero(n + 1);
            b(n) = 1.0;
            SpVec c(n);
            for (int m = 0; m < M; ++m)
                if (rho(m, k) > 0) c.insert(ix(m, k)) = cg * std::sqrt(rho(m, k));
            prog.add_cone(std::move(A), std::move(b), std::move(c), 0.0);
        }
        return prog;
    };

    Tally tally{&r, {}};
    r.bracket = {t_min, t_max, opts.sinr_epsilon, false};
    BisectionResult b = bisect_quasiconcave([&](double g) { return tally.check(build(g), opts.solver); }, r.bracket);
    r.bisection_iterations = b.iterations;

    Mat eta = tally.last_point.size() ? eta_from_x(tally.last_point, rho) : uni.eta_dl;
    // Keep the better of the certified point and the starting allocation.
    if (dl_sinr_statistical(stats, gains, eta, p_d, theta).minCoeff() < t_min) eta = uni.eta_dl;

    if (opts.equalize) {
        Vec a;
        Mat sp;
        coherent_and_spread(stats, gains, eta, a, sp);
        const double t = dl_sinr_statistical(stats, gains, eta, p_d, theta).minCoeff();
        // p_k P~ A_k^2 = t (P~ sum_i S_ki p_i + 1)
        Mat lhs = -t * sp;
        lhs.diagonal() += a.cwiseAbs2();
        Vec p;
        if (t > 0 && solve_scaling(lhs, Vec::Constant(K, t / pt), p))
            for (int k = 0; k < K; ++k) eta.col(k) *= p(k);
    }
    r.alloc.eta_dl = eta;
    r.common_value = dl_sinr_statistical(stats, gains, eta, p_d, theta).minCoeff();
    return r;
}

MaxminResult maxmin_ul_sinr(const EstimationStatistics& stats, const LargeScaleGains& gains, const Vec& p_ul,
                            const PowerControlOptions& opts) {
    require(p_ul.size() == stats.k(), "maxmin ul: power vector size");
    require((p_ul.array() >= 0).all(), "maxmin ul: negative power");
    const Mat& rho = stats.rho;
    const int M = stats.m(), K = stats.k();
    MaxminResult r;
    r.alloc.policy_tag = PolicyTag::maxmin_joint;
    const Vec uni = uniform_ul_coefficients(stats);
    r.alloc.eta_ul = uni;
    if ((p_ul.array() <= 0).any()) return r;  // a silent user pins the minimum at zero

    const Vec R = rho.colwise().sum().transpose();
    const Mat C = rho.transpose() * gains.zeta;  // C(k, i) = sum_m rho_mk zeta_mi
    double t_max = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k)
        t_max = std::min({t_max, p_ul(k) * R(k), C(k, k) > 0 ? R(k) * R(k) / C(k, k) : t_max});
    const double t_min = ul_sinr(stats, gains, p_ul, uni).minCoeff();
    r.common_value = t_min;
    if (!(t_max > t_min)) return r;

    auto build = [&](double gamma) {
        SocProgram prog(K);
        for (int k = 0; k < K; ++k) prog.set_bounds(k, 0.0, 1.0);
        for (int m = 0; m < M; ++m) {
            SpMat A(K, K);
            for (int k = 0; k < K; ++k)
                if (rho(m, k) > 0) A.insert(k, k) = std::sqrt(rho(m, k));
            prog.add_cone(std::move(A), Vec::Zero(K), SpVec(K), 1.0);
        }
        // ||[sqrt(P_ui C_ki) beta_i ; sqrt(R_k)]|| <= sqrt(P_uk / gamma) R_k beta_k
        for (int k = 0; k < K; ++k) {
            SpMat A(K + 1, K);
            for (int i = 0; i < K; ++i)
                if (C(k, i) > 0) A.insert(i, i) = std::sqrt(p_ul(i) * C(k, i));
            Vec b = Vec::Zero(K + 1);
            b(K) = std::sqrt(R(k));
            SpVec c(K);
            c.insert(k) = std::sqrt(p_ul(k) / gamma) * R(k);
            prog.add_cone(std::move(A), std::move(b), std::move(c), 0.0);
        }
        return prog;
    };

    Tally tally{&r, {}};
    r.bracket = {t_min, t_max, opts.sinr_epsilon, false};
    BisectionResult b = bisect_quasiconcave([&](double g) { return tally.check(build(g), opts.solver); }, r.bracket);
    r.bisection_iterations = b.iterations;

    Vec eta = uni;
    if (tally.last_point.size()) {
        Vec beta = tally.last_point.cwiseMax(0.0).cwiseMin(1.0);
        eta = beta.cwiseAbs2();
        const double load = (rho * eta).maxCoeff();
        if (load > 1) eta /= load * (1 + 1e-15);
        if (ul_sinr(stats, gains, p_ul, eta).minCoeff() < t_min) eta = uni;
    }
    if (opts.equalize) {
        const double t = ul_sinr(stats, gains, p_ul, eta).minCoeff();
        // eta_k P_uk R_k^2 = t (sum_i C_ki P_ui eta_i + R_k), solved for eta directly
        Mat lhs = -t * C * p_ul.asDiagonal();
        lhs.diagonal() += p_ul.cwiseProduct(R.cwiseAbs2());
        Vec e;
        if (t > 0 && solve_scaling(lhs, t * R, e) && (rho * e).maxCoeff() <= 1 + 1e-12) eta = e;
    }
    r.alloc.eta_ul = eta;
    r.common_value = ul_sinr(stats, gains, p_ul, eta).minCoeff();
    return r;
}

JointResult joint_dl_ul(const EstimationStatistics& stats, const LargeScaleGains& gains, double p_d,
                        const ProtocolSplit& split, const UplinkEnergyBudget& budget,
                        const PowerControlOptions& opts) {
    split.validate();
    budget.validate();
    JointResult j;
    j.stage1 = maxmin_energy_impl(stats, gains, p_d, opts, opts.literal_eta_box);
    const Mat& eta = j.stage1.alloc.eta_dl;
    Vec received;
    if (opts.printed_uplink_power) {
        Vec direct = (eta.array() * stats.rho.array().square()).colwise().sum().transpose();
        Vec per_ap = (eta.array() * stats.rho.array()).rowwise().sum();
        received = p_d * (direct + gains.zeta.transpose() * per_ap);
    } else {
        received = average_received_power(stats, gains, eta, p_d);
    }
    // Linear harvesting of the received power over the energy-carrying symbols.
    const double share = split.tau_d * (split.alpha_ts + (1 - split.alpha_ts) * split.theta_ps);
    j.p_ul.resize(stats.k());
    for (int k = 0; k < stats.k(); ++k) j.p_ul(k) = ul_transmit_power(share * received(k), budget, split);

    j.stage2 = maxmin_ul_sinr(stats, gains, j.p_ul, opts);
    j.alloc.eta_dl = eta;
    j.alloc.eta_ul = j.stage2.alloc.eta_ul;
    j.alloc.policy_tag = PolicyTag::maxmin_joint;
    j.common_energy = j.stage1.common_value;
    j.common_ul_sinr = j.stage2.common_value;
    return j;
}

MoopResult asymptotic_moop(const EstimationStatistics& stats, double p_d, const MoopWeights& weights,
                           const PowerControlOptions& opts) {
    weights.validate();
    require(p_d > 0, "moop: P_d must be positive");
    const Mat& rho = stats.rho;
    const int M = stats.m(), K = stats.k();
    Index ix{M, K};
    const int n = M * K + 1, sv = M * K;

    // Either weighting is monotone in the common gain, so the program maximizes it directly.
    double sbar = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) sbar = std::min(sbar, rho.col(k).cwiseSqrt().sum());
    require(sbar > 0, "moop: a user has zero gain");

    MoopResult res;
    res.alloc.policy_tag = PolicyTag::asymptotic_moop;
    Vec x;
    if (K == 1) {
        x = Vec::Ones(M);  // each AP spends its whole budget on the single user
    } else {
        SocProgram prog(n);
        for (int j = 0; j < M * K; ++j) prog.set_bounds(j, 0.0, 1.0);
        prog.set_bounds(sv, 0.0, 1.0);
        for (int m = 0; m < M; ++m) {
            SpMat A(K, n);
            for (int k = 0; k < K; ++k) A.insert(k, ix(m, k)) = 1.0;
            prog.add_cone(std::move(A), Vec::Zero(K), SpVec(n), 1.0);
        }
        for (int k = 0; k < K; ++k) {
            SpVec g(n);
            for (int m = 0; m < M; ++m)
                if (rho(m, k) > 0) g.insert(ix(m, k)) = -std::sqrt(rho(m, k)) / sbar;
            g.insert(sv) = 1.0;
            prog.add_linear(std::move(g), 0.0);
        }
        Vec obj = Vec::Zero(n);
        obj(sv) = 1.0;
        prog.objective = obj;
        FeasibilityResult f = solve_maximize(prog, opts.solver);
        if (f.status != SolveStatus::feasible) throw numerical_failure("moop: solver returned " + to_string(f.status));
        x = f.point.head(M * K);
    }
    res.alloc.eta_dl = eta_from_x(x, rho);
    res.alloc.eta_ul = uniform_ul_coefficients(stats);
    Vec gain = (res.alloc.eta_dl.array().sqrt() * rho.array()).colwise().sum().transpose();
    res.common_gain = gain.minCoeff();
    res.lambda_star = p_d * res.common_gain * res.common_gain;
    return res;
}

TradeoffCurve tradeoff_curve_ps(const EstimationStatistics& stats, const LargeScaleGains& gains, double p_d,
                                const HarvesterParams& params, const ProtocolSplit& split, int grid_size,
                                double noise_w, const PowerControlOptions& opts) {
    require(grid_size >= 2, "tradeoff: grid needs at least two points");
    params.validate();
    const double p_common = maxmin_energy(stats, gains, p_d, opts).common_value * p_d * noise_w;
    TradeoffCurve curve;
    curve.energy_per_user_scale = Vec::Constant(stats.k(), p_common);
    for (int j = 0; j < grid_size; ++j) {
        ProtocolSplit sp = split;
        sp.alpha_ts = 0.0;
        sp.theta_ps = static_cast<double>(j) / (grid_size - 1);
        TradeoffPoint pt;
        pt.protocol = Protocol::PS;
        pt.split_factor = sp.theta_ps;
        pt.common_energy = average_harvested_energy_ub(p_common, sp, params);
        const double g = maxmin_rate(stats, gains, p_d, sp.theta_ps, opts).common_value;
        pt.common_rate = dl_rate(g, sp);
        curve.points.push_back(pt);
    }
    return curve;
}

TradeoffCurve tradeoff_curve_ts_from(double common_power_w, double common_sinr, const HarvesterParams& params,
                                     const ProtocolSplit& split, int grid_size) {
    require(grid_size >= 2, "tradeoff: grid needs at least two points");
    TradeoffCurve curve;
    curve.energy_per_user_scale = Vec::Constant(1, common_power_w);
    for (int j = 0; j < grid_size; ++j) {
        ProtocolSplit sp = split;
        sp.theta_ps = 0.0;
        sp.alpha_ts = static_cast<double>(j) / (grid_size - 1);
        TradeoffPoint pt;
        pt.protocol = Protocol::TS;
        pt.split_factor = sp.alpha_ts;
        pt.common_energy = average_harvested_energy_ub(common_power_w, sp, params);
        pt.common_rate = dl_rate(common_sinr, sp);
        curve.points.push_back(pt);
    }
    return curve;
}

TradeoffCurve tradeoff_curve_ts(const EstimationStatistics& stats, const LargeScaleGains& gains, double p_d,
                                const HarvesterParams& params, const ProtocolSplit& split, int grid_size,
                                double noise_w, const PowerControlOptions& opts) {
    params.validate();
    const double p_common = maxmin_energy(stats, gains, p_d, opts).common_value * p_d * noise_w;
    const double g = maxmin_rate(stats, gains, p_d, 0.0, opts).common_value;
    TradeoffCurve c = tradeoff_curve_ts_from(p_common, g, params, split, grid_size);
    c.energy_per_user_scale = Vec::Constant(stats.k(), p_common);
    return c;
}

double recover_theta_from_energy(double energy, double common_power_w, const HarvesterParams& params,
                                 const ProtocolSplit& split) {
    require(common_power_w > 0 && split.tau_d > 0, "recover theta: need positive power and tau_d");
    return eh_inverse(energy / split.tau_d, params) / common_power_w;
}

double recover_theta_from_rate(double rate, const EstimationStatistics& stats, const LargeScaleGains& gains,
                               const Mat& eta, double p_d, const ProtocolSplit& split) {
    require(split.tau_d > 0, "recover theta: tau_d must be positive");
    const double g = std::exp2(rate * split.tau_c / split.tau_d) - 1;
    Vec a;
    Mat sp;
    coherent_and_spread(stats, gains, eta, a, sp);
    Vec spread = sp.rowwise().sum();
    // gamma = P~ A^2 / (P~ B + 1)  =>  P~ = gamma / (A^2 - gamma B); averaged over users
    double pt = 0.0;
    for (int k = 0; k < stats.k(); ++k) pt += g / (a(k) * a(k) - g * spread(k));
    pt /= stats.k();
    return 1.0 - pt / p_d;
}

double recover_alpha_from_energy(double energy, double common_power_w, const HarvesterParams& params,
                                 const ProtocolSplit& split) {
    const double full = split.tau_d * eh_transfer(common_power_w, params);
    require(full > 0, "recover alpha: harvester output is zero");
    return energy / full;
}

}  // namespace swipt
