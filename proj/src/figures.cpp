#include "swipt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace swipt {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

std::vector<double> dbm_sweep(double lo, double hi, double step, double extra) {
    std::vector<double> v;
    for (double d = lo; d <= hi + 1e-9; d += step) v.push_back(d);
    if (!std::isnan(extra)) v.push_back(extra);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }), v.end());
    return v;
}

// |a - b| / max(|a|, |b|), zero when both vanish.
double rel_gap(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s > 0 ? std::abs(a - b) / s : 0.0;
}

double spread(const Vec& v) {
    double g = 0;
    for (int i = 0; i < v.size(); ++i)
        for (int j = i + 1; j < v.size(); ++j) g = std::max(g, rel_gap(v(i), v(j)));
    return g;
}

// y at x0 on a piecewise linear curve; x need not be monotone, first crossing wins.
double interp_at(const std::vector<double>& x, const std::vector<double>& y, double x0) {
    for (size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i], b = x[i + 1];
        if ((x0 - a) * (x0 - b) <= 0) {
            if (a == b) return y[i];
            const double f = (x0 - a) / (b - a);
            return y[i] + f * (y[i + 1] - y[i]);
        }
    }
    return kNaN;
}

std::string mtag(int m) { return "M" + std::to_string(m); }

double linear_energy(double p_w, const ProtocolSplit& s) {
    return s.alpha_ts * s.tau_d * linear_eh(p_w) + (1 - s.alpha_ts) * s.tau_d * linear_eh(s.theta_ps * p_w);
}

Vec jensen_energy(const Vec& avg_power, const ProtocolSplit& s, const ExperimentConfig& cfg) {
    Vec e(avg_power.size());
    for (int k = 0; k < e.size(); ++k)
        e(k) = average_harvested_energy_ub(avg_power(k) * cfg.link.noise_w(), s, cfg.eh);
    return e;
}

// Largest input power at which the linear model meets the logistic curve.
double linear_crossing(const HarvesterParams& eh) {
    auto g = [&](double p) { return linear_eh(p) - eh_transfer(p, eh); };
    double hi = eh.lambda_sat / 0.9 * 1.01;
    double lo = hi;
    while (lo > 1e-15 && g(lo) > 0) lo *= 0.9;
    if (g(lo) > 0) return 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0 ? hi : lo) = mid;
    }
    return hi;
}

// ---------------------------------------------------------------------------
// Harvested energy against transmit power, linear and logistic harvesters.

RunOutput figure3(const ExperimentConfig& cfg) {
    const std::vector<int> ms = {64, 484};
    const double five_mw = 10 * std::log10(5.0);
    const auto dbm = dbm_sweep(-10, 30, 2, five_mw);
    const size_t i5 = std::find_if(dbm.begin(), dbm.end(), [&](double d) { return std::abs(d - five_mw) < 1e-9; }) -
                      dbm.begin();
    const ProtocolSplit modes[2] = {ProtocolSplit::make(cfg.k, false, cfg.alpha, 0.0, cfg.tau_c),
                                    ProtocolSplit::make(cfg.k, false, 0.0, cfg.theta, cfg.tau_c)};
    const char* mode_name[2] = {"ts", "ps"};
    const char* model_name[3] = {"nonlinear", "linear", "asymptotic"};
    const double knee = linear_crossing(cfg.eh);
    const double noise_w = cfg.link.noise_w();
    const size_t np = dbm.size();

    struct Trial {
        std::vector<double> e;  // [m][mode][model][point]
        int checked = 0, violations = 0;
    };
    auto at = [&](int mi, int mode, int model, size_t p) { return ((mi * 2 + mode) * 3 + model) * np + p; };
    std::vector<Trial> res(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](int tr) {
        Trial& t = res[tr];
        t.e.assign(ms.size() * 2 * 3 * np, 0.0);
        for (size_t mi = 0; mi < ms.size(); ++mi) {
            Topology topo = draw_topology(cfg, ms[mi], tr);
            const Mat eta = uniform_allocation(topo.stats).eta_dl;
            // Received power is linear in P_d, so one set of draws serves the whole sweep.
            const Mat base = sample_received_power(topo, eta, 1.0, cfg.fading_draws, topo.seed);
            const Vec coh = (eta.array().sqrt() * topo.stats.rho.array()).colwise().sum().square().transpose();
            for (size_t p = 0; p < np; ++p) {
                const double pd_w = cfg.link.normalized_power(dbm[p]) * noise_w;
                for (int mode = 0; mode < 2; ++mode) {
                    const ProtocolSplit& s = modes[mode];
                    double nl = 0, lin = 0, input = 0;
                    for (int d = 0; d < base.rows(); ++d)
                        for (int k = 0; k < base.cols(); ++k) {
                            const double pw = pd_w * base(d, k);
                            nl += instantaneous_harvested_energy(pw, s, cfg.eh);
                            lin += linear_energy(pw, s);
                            input += s.alpha_ts > 0 ? pw : s.theta_ps * pw;
                        }
                    nl /= base.rows();
                    lin /= base.rows();
                    input /= base.rows() * base.cols();
                    double asym = 0;
                    for (int k = 0; k < coh.size(); ++k)
                        asym += instantaneous_harvested_energy(pd_w * coh(k), s, cfg.eh);
                    t.e[at(mi, mode, 0, p)] = nl;
                    t.e[at(mi, mode, 1, p)] = lin;
                    t.e[at(mi, mode, 2, p)] = asym;
                    if (input > knee) {
                        ++t.checked;
                        if (!(lin > nl)) ++t.violations;
                    }
                }
            }
        }
    });

    RunOutput out;
    ResultTable tab{"fig3_energy", {"gamma_dbm", "gamma_mw", "M", "protocol", "model", "energy_mj"}, {}};
    std::vector<double> mean(ms.size() * 2 * 3 * np, 0.0);
    int checked = 0, violations = 0;
    for (const auto& t : res) {
        for (size_t i = 0; i < mean.size(); ++i) mean[i] += t.e[i] / cfg.trials;
        checked += t.checked;
        violations += t.violations;
    }
    for (size_t mi = 0; mi < ms.size(); ++mi)
        for (int mode = 0; mode < 2; ++mode)
            for (int model = 0; model < 3; ++model)
                for (size_t p = 0; p < np; ++p)
                    tab.add_row({format_number(dbm[p]), format_number(std::pow(10.0, dbm[p] / 10)),
                                 std::to_string(ms[mi]), mode_name[mode], model_name[model],
                                 format_number(cfg.link.to_mj(mean[at(mi, mode, model, p)]))});
    out.tables.push_back(std::move(tab));
    for (int mode = 0; mode < 2; ++mode) {
        const std::string key = std::string("fig3_") + mode_name[mode];
        out.summary[key + "_energy_mj_M64_5mw"] = cfg.link.to_mj(mean[at(0, mode, 0, i5)]);
        out.summary[key + "_energy_mj_M484_5mw"] = cfg.link.to_mj(mean[at(1, mode, 0, i5)]);
        out.summary[key + "_ratio_484_over_64_5mw"] = mean[at(1, mode, 0, i5)] / mean[at(0, mode, 0, i5)];
    }
    out.summary["fig3_linear_crossing_w"] = knee;
    out.summary["fig3_linear_checks"] = checked;
    out.summary["fig3_linear_violations"] = violations;
    out.notes = "points past the crossing are those whose mean harvester input exceeds the largest power at "
                "which 0.9 P equals the logistic output\n";
    return out;
}

// ---------------------------------------------------------------------------
// Cell-free against co-located antennas, uniform power.

RunOutput figure4(const ExperimentConfig& cfg) {
    const auto grid = linspace(0, 1, cfg.grid_size);
    const size_t ng = grid.size();
    const double p_d = cfg.p_d();
    // [arch][protocol][point] for energy and rate
    auto at = [&](int arch, int proto, size_t j) { return (arch * 2 + proto) * ng + j; };
    std::vector<std::vector<double>> energy(cfg.trials), rate(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](int tr) {
        energy[tr].assign(4 * ng, 0.0);
        rate[tr].assign(4 * ng, 0.0);
        for (int arch = 0; arch < 2; ++arch) {
            Topology topo = draw_topology(cfg, cfg.m, tr, arch == 1);
            const Mat eta = uniform_allocation(topo.stats).eta_dl;
            const Vec avg = average_received_power(topo.stats, topo.gains, eta, p_d);
            for (int proto = 0; proto < 2; ++proto)
                for (size_t j = 0; j < ng; ++j) {
                    const double a = proto == 0 ? grid[j] : 0.0, th = proto == 1 ? grid[j] : 0.0;
                    const ProtocolSplit s = ProtocolSplit::make(cfg.k, false, a, th, cfg.tau_c);
                    energy[tr][at(arch, proto, j)] = jensen_energy(avg, s, cfg).sum();
                    rate[tr][at(arch, proto, j)] =
                        dl_rate(dl_sinr_statistical(topo.stats, topo.gains, eta, p_d, th), s).sum();
                }
        }
    });

    std::vector<double> e(4 * ng, 0.0), r(4 * ng, 0.0);
    for (int tr = 0; tr < cfg.trials; ++tr)
        for (size_t i = 0; i < e.size(); ++i) {
            e[i] += cfg.link.to_mj(energy[tr][i]) / cfg.trials;
            r[i] += rate[tr][i] / cfg.trials;
        }

    RunOutput out;
    ResultTable tab{"fig4_tradeoff", {"architecture", "protocol", "split", "sum_energy_mj", "sum_rate_bps_hz"}, {}};
    const char* arch_name[2] = {"cellfree", "colocated"};
    const char* proto_name[2] = {"ts", "ps"};
    const double target_rate = 1.5;
    for (int arch = 0; arch < 2; ++arch)
        for (int proto = 0; proto < 2; ++proto) {
            std::vector<double> ec(ng), rc(ng);
            for (size_t j = 0; j < ng; ++j) {
                ec[j] = e[at(arch, proto, j)];
                rc[j] = r[at(arch, proto, j)];
                tab.add_row({arch_name[arch], proto_name[proto], format_number(grid[j]), format_number(ec[j]),
                             format_number(rc[j])});
            }
            out.summary[std::string("fig4_") + proto_name[proto] + "_" + arch_name[arch] + "_energy_mj_at_rate"] =
                interp_at(rc, ec, target_rate);
            out.summary[std::string("fig4_") + proto_name[proto] + "_" + arch_name[arch] + "_max_sum_rate"] =
                *std::max_element(rc.begin(), rc.end());
        }
    for (const char* p : proto_name) {
        const std::string k = std::string("fig4_") + p;
        out.summary[k + "_cellfree_gain"] =
            out.summary[k + "_cellfree_energy_mj_at_rate"] / out.summary[k + "_colocated_energy_mj_at_rate"] - 1.0;
    }
    out.summary["fig4_target_sum_rate"] = target_rate;
    out.tables.push_back(std::move(tab));
    return out;
}

// ---------------------------------------------------------------------------
// CDFs of the minimum rate and minimum harvested energy.

RunOutput figure56(const ExperimentConfig& cfg) {
    RunOutput out;
    const std::string stem = "fig" + std::to_string(cfg.figure);
    std::map<std::string, double> l90;
    for (int m : {64, 144})
        for (PolicyMode pol : {PolicyMode::uniform, PolicyMode::maxmin}) {
            ExperimentConfig c = cfg;
            c.figure = 0;
            c.m = m;
            c.policy = pol;
            c.protocol = ProtocolMode::ps;
            c.scenario = stem + "_" + mtag(m) + "_" + to_string(pol);
            RunOutput r = run_scenario(c);
            for (auto& t : r.tables)
                if (t.name.find("_cdf_") != std::string::npos) out.tables.push_back(std::move(t));
            const std::string key = stem + "_" + mtag(m) + "_" + to_string(pol);
            for (const auto& [k, v] : r.summary) out.summary[key + "_" + k] = v;
            l90["rate_" + mtag(m) + to_string(pol)] = r.summary.count("likely90_min_rate")
                                                          ? r.summary["likely90_min_rate"]
                                                          : kNaN;
            l90["energy_" + mtag(m) + to_string(pol)] = r.summary.count("likely90_min_energy_mj")
                                                            ? r.summary["likely90_min_energy_mj"]
                                                            : kNaN;
            out.failed_trials += r.failed_trials;
            if (!r.notes.empty()) out.notes += key + ": " + r.notes;
        }
    for (const char* metric : {"rate", "energy"}) {
        const std::string mt = metric;
        // Fig. 5 shows rates, Fig. 6 energies, whichever was requested.
        const std::string fig = mt == "rate" ? "fig5" : "fig6";
        out.summary[fig + "_" + mt + "_maxmin_over_uniform_M64"] = l90[mt + "_M64maxmin"] / l90[mt + "_M64uniform"];
        out.summary[fig + "_" + mt + "_maxmin_over_uniform_M144"] =
            l90[mt + "_M144maxmin"] / l90[mt + "_M144uniform"];
        out.summary[fig + "_" + mt + "_M144_over_M64_maxmin"] = l90[mt + "_M144maxmin"] / l90[mt + "_M64maxmin"];
        out.summary[fig + "_" + mt + "_M144_over_M64_uniform"] =
            l90[mt + "_M144uniform"] / l90[mt + "_M64uniform"];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Per-user time-switching curves, uniform against max-min, one topology.

RunOutput figure7(const ExperimentConfig& cfg) {
    const Topology topo = draw_topology(cfg, cfg.m, 0);
    const double p_d = cfg.p_d();
    const auto grid = linspace(0, 1, cfg.grid_size);

    const Mat uni = uniform_allocation(topo.stats).eta_dl;
    const MaxminResult me = maxmin_energy(topo.stats, topo.gains, p_d, cfg.solver);
    const MaxminResult mr = maxmin_rate(topo.stats, topo.gains, p_d, 0.0, cfg.solver);

    struct Policy {
        const char* name;
        Vec power, sinr;
    };
    const Policy pols[2] = {
        {"uniform", average_received_power(topo.stats, topo.gains, uni, p_d),
         dl_sinr_statistical(topo.stats, topo.gains, uni, p_d, 0.0)},
        {"maxmin", average_received_power(topo.stats, topo.gains, me.alloc.eta_dl, p_d),
         dl_sinr_statistical(topo.stats, topo.gains, mr.alloc.eta_dl, p_d, 0.0)},
    };

    RunOutput out;
    ResultTable tab{"fig7_tradeoff", {"policy", "user", "alpha", "energy_mj", "rate_bps_hz"}, {}};
    for (const auto& pol : pols) {
        double egap = 0, rgap = 0;
        for (double a : grid) {
            const ProtocolSplit s = ProtocolSplit::make(cfg.k, false, a, 0.0, cfg.tau_c);
            const Vec e = jensen_energy(pol.power, s, cfg);
            const Vec r = dl_rate(pol.sinr, s);
            egap = std::max(egap, spread(e));
            rgap = std::max(rgap, spread(r));
            for (int k = 0; k < cfg.k; ++k)
                tab.add_row({pol.name, std::to_string(k), format_number(a), format_number(cfg.link.to_mj(e(k))),
                             format_number(r(k))});
        }
        const std::string key = std::string("fig7_") + pol.name;
        out.summary[key + "_energy_gap"] = egap;
        out.summary[key + "_rate_gap"] = rgap;
        out.summary[key + "_power_gap"] = spread(pol.power);
        out.summary[key + "_sinr_gap"] = spread(pol.sinr);
    }
    out.summary["fig7_epsilon"] = std::max(cfg.solver.sinr_epsilon, cfg.solver.energy_epsilon);
    out.summary["fig7_solver_failures"] = me.solver_failures + mr.solver_failures;
    out.tables.push_back(std::move(tab));
    return out;
}

// ---------------------------------------------------------------------------
// Max-min trade-off against the number of APs, with large-array limits.

RunOutput figure8(const ExperimentConfig& cfg) {
    std::vector<int> ms = {64, 144, 484};
    const auto grid = linspace(0, 1, cfg.grid_size);
    const int ps_points = cfg.heavy ? cfg.grid_size : 21;
    const auto ps_grid = linspace(0, 1, ps_points);
    const double p_d = cfg.p_d(), noise_w = cfg.link.noise_w();
    const int K = cfg.k;

    struct Curves {
        std::vector<double> ts_e, ts_r, ps_e, ps_r, as_e, as_r, mc_e, mc_r;
        int failures = 0;
    };
    std::vector<Curves> mean(ms.size());
    RunOutput out;
    ResultTable tab{"fig8_tradeoff", {"M", "curve", "split", "sum_energy_mj", "sum_rate_bps_hz"}, {}};

    for (size_t mi = 0; mi < ms.size(); ++mi) {
        const bool with_ps = ms[mi] <= 144 || cfg.heavy;
        std::vector<Curves> per(cfg.trials);
        parallel_for(cfg.trials, cfg.threads, [&](int tr) {
            Curves& c = per[tr];
            const Topology topo = draw_topology(cfg, ms[mi], tr);
            const MaxminResult me = maxmin_energy(topo.stats, topo.gains, p_d, cfg.solver);
            const MaxminResult r0 = maxmin_rate(topo.stats, topo.gains, p_d, 0.0, cfg.solver);
            c.failures += me.solver_failures + r0.solver_failures;
            const double p_common = me.common_value * p_d * noise_w;
            const ProtocolSplit base = ProtocolSplit::make(K, false, 0.0, 0.0, cfg.tau_c);
            for (const auto& pt : tradeoff_curve_ts_from(p_common, r0.common_value, cfg.eh, base, cfg.grid_size)
                                      .points) {
                c.ts_e.push_back(K * pt.common_energy);
                c.ts_r.push_back(K * pt.common_rate);
            }
            if (with_ps)
                for (double th : ps_grid) {
                    const ProtocolSplit s = ProtocolSplit::make(K, false, 0.0, th, cfg.tau_c);
                    const MaxminResult r = maxmin_rate(topo.stats, topo.gains, p_d, th, cfg.solver);
                    c.failures += r.solver_failures;
                    c.ps_e.push_back(K * average_harvested_energy_ub(p_common, s, cfg.eh));
                    c.ps_r.push_back(K * dl_rate(r.common_value, s));
                }
            // Large-array limits and the finite-M values, both under the asymptotic allocation.
            const MoopResult moop = asymptotic_moop(topo.stats, p_d, {}, cfg.solver);
            const Mat pw = sample_received_power(topo, moop.alloc.eta_dl, p_d, cfg.fading_draws, topo.seed);
            const Vec sinr = dl_sinr_statistical(topo.stats, topo.gains, moop.alloc.eta_dl, p_d, 0.0);
            for (double a : grid) {
                const ProtocolSplit s = ProtocolSplit::make(K, false, a, 0.0, cfg.tau_c);
                const AsymptoticMetrics am = asymptotic_metrics(topo.stats, moop.alloc.eta_dl, p_d, s, cfg.eh, noise_w);
                c.as_e.push_back(am.harvested_energy.sum());
                c.as_r.push_back(am.rate.sum());
                double e = 0;
                for (int d = 0; d < pw.rows(); ++d)
                    for (int k = 0; k < K; ++k) e += instantaneous_harvested_energy(pw(d, k) * noise_w, s, cfg.eh);
                c.mc_e.push_back(e / pw.rows());
                c.mc_r.push_back(dl_rate(sinr, s).sum());
            }
        });
        Curves& m = mean[mi];
        auto avg = [&](std::vector<double> Curves::*f) {
            std::vector<double> v((per[0].*f).size(), 0.0);
            for (const auto& c : per)
                for (size_t j = 0; j < v.size(); ++j) v[j] += (c.*f)[j] / cfg.trials;
            m.*f = v;
        };
        for (auto f : {&Curves::ts_e, &Curves::ts_r, &Curves::ps_e, &Curves::ps_r, &Curves::as_e, &Curves::as_r,
                       &Curves::mc_e, &Curves::mc_r})
            avg(f);
        for (const auto& c : per) m.failures += c.failures;
        auto emit = [&](const char* name, const std::vector<double>& g, const std::vector<double>& e,
                        const std::vector<double>& r) {
            for (size_t j = 0; j < e.size(); ++j)
                tab.add_row({std::to_string(ms[mi]), name, format_number(g[j]), format_number(cfg.link.to_mj(e[j])),
                             format_number(r[j])});
        };
        emit("ts_maxmin", grid, m.ts_e, m.ts_r);
        if (with_ps) emit("ps_maxmin", ps_grid, m.ps_e, m.ps_r);
        emit("ts_asymptotic", grid, m.as_e, m.as_r);
        emit("ts_asymptotic_alloc_finite", grid, m.mc_e, m.mc_r);
        out.summary["fig8_" + mtag(ms[mi]) + "_solver_failures"] = m.failures;
        out.summary["fig8_" + mtag(ms[mi]) + "_max_sum_energy_mj"] = cfg.link.to_mj(m.ts_e.back());
        out.summary["fig8_" + mtag(ms[mi]) + "_max_sum_rate"] = m.ts_r.front();
    }
    out.tables.push_back(std::move(tab));

    // Rate at matched energy along the TS curves, energy increasing with alpha.
    auto rate_at = [&](size_t mi, double e) { return interp_at(mean[mi].ts_e, mean[mi].ts_r, e); };
    double e_top = std::numeric_limits<double>::infinity();
    for (const auto& m : mean) e_top = std::min(e_top, m.ts_e.back());
    bool monotone = true;
    for (double e : linspace(0, e_top, 50))
        for (size_t mi = 0; mi + 1 < ms.size(); ++mi)
            if (rate_at(mi + 1, e) < rate_at(mi, e) * (1 - 1e-9)) monotone = false;
    out.summary["fig8_monotone_in_m"] = monotone ? 1.0 : 0.0;
    const double e_match = 0.5 * std::min(mean[0].ts_e.back(), mean[1].ts_e.back());
    out.summary["fig8_matched_energy_mj"] = cfg.link.to_mj(e_match);
    out.summary["fig8_ts_sum_rate_gain_144_over_64"] = rate_at(1, e_match) / rate_at(0, e_match) - 1.0;

    // Finite M against its limit, interior points where both curves are nonzero.
    const Curves& big = mean.back();
    double dev = 0;
    for (size_t j = 1; j + 1 < grid.size(); ++j) {
        dev = std::max(dev, std::abs(big.mc_e[j] - big.as_e[j]) / big.as_e[j]);
        dev = std::max(dev, std::abs(big.mc_r[j] - big.as_r[j]) / big.as_r[j]);
    }
    out.summary["fig8_M484_max_rel_dev_from_limit"] = dev;
    out.notes = "matched energy is half the smaller maximum TS energy of the M=64 and M=144 curves\n";
    return out;
}

// ---------------------------------------------------------------------------
// Sum rate and total energy over the (alpha, theta) grid under max-min.

RunOutput figure910(const ExperimentConfig& cfg) {
    const auto grid = linspace(0, 1, cfg.grid_size);
    const double p_d = cfg.p_d(), noise_w = cfg.link.noise_w();
    const int K = cfg.k;
    RunOutput out;
    ResultTable rt{"fig9_sum_rate", {"M", "alpha", "theta", "sum_rate_bps_hz"}, {}};
    ResultTable et{"fig10_total_energy", {"M", "alpha", "theta", "total_energy_mj"}, {}};
    for (int m : {64, 144}) {
        const size_t ng = grid.size();
        std::vector<double> rate(ng * ng, 0.0), energy(ng * ng, 0.0);
        int failures = 0;
        for (int tr = 0; tr < cfg.trials; ++tr) {
            const Topology topo = draw_topology(cfg, m, tr);
            const MaxminResult me = maxmin_energy(topo.stats, topo.gains, p_d, cfg.solver);
            failures += me.solver_failures;
            const double p_common = me.common_value * p_d * noise_w;
            std::vector<MaxminResult> rr(ng);
            parallel_for(static_cast<int>(ng), cfg.threads,
                         [&](int j) { rr[j] = maxmin_rate(topo.stats, topo.gains, p_d, grid[j], cfg.solver); });
            for (size_t it = 0; it < ng; ++it) {
                failures += rr[it].solver_failures;
                for (size_t ia = 0; ia < ng; ++ia) {
                    const ProtocolSplit s = ProtocolSplit::make(K, false, grid[ia], grid[it], cfg.tau_c);
                    rate[ia * ng + it] += K * dl_rate(rr[it].common_value, s) / cfg.trials;
                    energy[ia * ng + it] += K * average_harvested_energy_ub(p_common, s, cfg.eh) / cfg.trials;
                }
            }
        }
        for (size_t ia = 0; ia < ng; ++ia)
            for (size_t it = 0; it < ng; ++it) {
                rt.add_row({double(m), grid[ia], grid[it], rate[ia * ng + it]});
                et.add_row({double(m), grid[ia], grid[it], cfg.link.to_mj(energy[ia * ng + it])});
            }
        out.summary["fig9_" + mtag(m) + "_max_sum_rate"] = *std::max_element(rate.begin(), rate.end());
        out.summary["fig10_" + mtag(m) + "_max_total_energy_mj"] =
            cfg.link.to_mj(*std::max_element(energy.begin(), energy.end()));
        out.summary["fig910_" + mtag(m) + "_solver_failures"] = failures;
    }
    out.tables.push_back(std::move(rt));
    out.tables.push_back(std::move(et));
    return out;
}

// ---------------------------------------------------------------------------
// Uplink rate against harvested downlink energy, joint against uniform.

RunOutput figure11(const ExperimentConfig& cfg) {
    const auto dbm = dbm_sweep(-10, 30, cfg.heavy ? 1 : 2, kNaN);
    const ProtocolSplit s = ProtocolSplit::make(cfg.k, false, cfg.alpha, cfg.theta, cfg.tau_c);
    const double share = s.tau_d * (s.alpha_ts + (1 - s.alpha_ts) * s.theta_ps);
    UplinkEnergyBudget budget;
    budget.kappa = cfg.kappa;
    const int K = cfg.k, np = static_cast<int>(dbm.size());

    // [policy][point] per-user energy and rate, averaged over topologies
    std::vector<Mat> energy(2, Mat::Zero(np, K)), rate(2, Mat::Zero(np, K));
    int failures = 0;
    for (int tr = 0; tr < cfg.trials; ++tr) {
        const Topology topo = draw_topology(cfg, cfg.m, tr);
        const PowerAllocation uni = uniform_allocation(topo.stats);
        std::vector<JointResult> joint(np);
        parallel_for(np, cfg.threads, [&](int p) {
            joint[p] = joint_dl_ul(topo.stats, topo.gains, cfg.link.normalized_power(dbm[p]), s, budget, cfg.solver);
        });
        for (int p = 0; p < np; ++p) {
            const double p_d = cfg.link.normalized_power(dbm[p]);
            const Vec avg_u = average_received_power(topo.stats, topo.gains, uni.eta_dl, p_d);
            Vec pul(K);
            for (int k = 0; k < K; ++k) pul(k) = ul_transmit_power(share * avg_u(k), budget, s);
            energy[0].row(p) += jensen_energy(avg_u, s, cfg).transpose() / cfg.trials;
            rate[0].row(p) += ul_rate(ul_sinr(topo.stats, topo.gains, pul, uni.eta_ul), s).transpose() / cfg.trials;

            const JointResult& j = joint[p];
            failures += j.stage1.solver_failures + j.stage2.solver_failures;
            const Vec avg_j = average_received_power(topo.stats, topo.gains, j.alloc.eta_dl, p_d);
            energy[1].row(p) += jensen_energy(avg_j, s, cfg).transpose() / cfg.trials;
            rate[1].row(p) +=
                ul_rate(ul_sinr(topo.stats, topo.gains, j.p_ul, j.alloc.eta_ul), s).transpose() / cfg.trials;
        }
    }

    RunOutput out;
    ResultTable tab{"fig11_ul_dl", {"policy", "gamma_dbm", "user", "dl_energy_mj", "ul_rate_bps_hz"}, {}};
    const char* names[2] = {"uniform", "joint"};
    for (int pol = 0; pol < 2; ++pol) {
        double gap = 0, min_rate = std::numeric_limits<double>::infinity();
        for (int p = 0; p < np; ++p) {
            for (int k = 0; k < K; ++k)
                tab.add_row({names[pol], format_number(dbm[p]), std::to_string(k),
                             format_number(cfg.link.to_mj(energy[pol](p, k))), format_number(rate[pol](p, k))});
            gap = std::max(gap, spread(rate[pol].row(p).transpose()));
            min_rate = std::min(min_rate, rate[pol].row(p).minCoeff());
        }
        out.summary[std::string("fig11_") + names[pol] + "_max_ul_rate_gap"] = gap;
        out.summary[std::string("fig11_") + names[pol] + "_min_ul_rate_at_top"] = rate[pol].row(np - 1).minCoeff();
    }
    out.summary["fig11_solver_failures"] = failures;
    out.tables.push_back(std::move(tab));
    return out;
}

// ---------------------------------------------------------------------------
// Downlink pilots against statistical CSI, uniform power.

RunOutput figure12(const ExperimentConfig& cfg) {
    const auto grid = linspace(0, 1, cfg.grid_size);
    const int ng = static_cast<int>(grid.size()), K = cfg.k;
    const double p_d = cfg.p_d();
    const DownlinkPilotConfig dlp{K, cfg.link.normalized_power(cfg.dl_pilot_power_dbm)};
    const int mc_draws = std::max(1, cfg.fading_draws / 5);

    // columns: rate_stat, rate_pilots, rate_pilots_mc, energy_stat, energy_pilots
    std::vector<Mat> acc(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](int tr) {
        Mat a = Mat::Zero(2 * ng, 5);
        const Topology topo = draw_topology(cfg, cfg.m, tr);
        const Mat eta = uniform_allocation(topo.stats).eta_dl;
        const Vec avg = average_received_power(topo.stats, topo.gains, eta, p_d);
        Rng rng = make_rng(topo.seed, 21);
        std::vector<EffectiveChannel> eff;
        for (int d = 0; d < mc_draws; ++d) {
            const ChannelRealization ch = draw_channel(topo.gains, rng);
            const ChannelEstimate est = estimate_uplink(ch, topo.pilots, rng);
            eff.push_back(beamform_dl_pilots_and_estimate(ch, est, topo.stats, eta, dlp, rng));
        }
        for (int proto = 0; proto < 2; ++proto)
            for (int j = 0; j < ng; ++j) {
                const double al = proto == 0 ? grid[j] : 0.0, th = proto == 1 ? grid[j] : 0.0;
                const ProtocolSplit sn = ProtocolSplit::make(K, false, al, th, cfg.tau_c);
                const ProtocolSplit sp = ProtocolSplit::make(K, true, al, th, cfg.tau_c);
                const int row = proto * ng + j;
                a(row, 0) = dl_rate(dl_sinr_statistical(topo.stats, topo.gains, eta, p_d, th), sn).sum();
                a(row, 1) = dl_rate_with_pilots(topo.stats, topo.gains, eta, p_d, sp, dlp).sum();
                double mc = 0;
                for (const auto& e : eff) {
                    const Vec g = dl_sinr_given_estimate(e, topo.stats, topo.gains, eta, p_d, th, dlp);
                    mc += g.unaryExpr([](double x) { return std::log2(1 + x); }).sum();
                }
                a(row, 2) = (1 - al) * sp.tau_dd() / double(sp.tau_c) * mc / mc_draws;
                a(row, 3) = jensen_energy(avg, sn, cfg).sum();
                a(row, 4) = jensen_energy(avg, sp, cfg).sum();
            }
        acc[tr] = a;
    });
    Mat mean = Mat::Zero(2 * ng, 5);
    for (const auto& a : acc) mean += a / cfg.trials;

    RunOutput out;
    ResultTable tab{"fig12_dl_pilots",
                    {"protocol", "split", "csi", "sum_rate_bps_hz", "sum_rate_mc_bps_hz", "sum_energy_mj"},
                    {}};
    const char* pn[2] = {"ts", "ps"};
    double rate_gain = std::numeric_limits<double>::infinity(), energy_loss = rate_gain;
    int checked = 0;
    for (int proto = 0; proto < 2; ++proto)
        for (int j = 0; j < ng; ++j) {
            const int row = proto * ng + j;
            const std::string g = format_number(grid[j]);
            tab.add_row({pn[proto], g, "statistical", format_number(mean(row, 0)), "nan",
                         format_number(cfg.link.to_mj(mean(row, 3)))});
            tab.add_row({pn[proto], g, "dl_pilots", format_number(mean(row, 1)), format_number(mean(row, 2)),
                         format_number(cfg.link.to_mj(mean(row, 4)))});
            if (mean(row, 0) > 0) {
                rate_gain = std::min(rate_gain, mean(row, 1) - mean(row, 0));
                ++checked;
            }
            if (mean(row, 3) > 0) energy_loss = std::min(energy_loss, mean(row, 3) - mean(row, 4));
        }
    out.summary["fig12_min_rate_gain"] = rate_gain;
    out.summary["fig12_min_energy_loss_mj"] = cfg.link.to_mj(energy_loss);
    out.summary["fig12_points_checked"] = checked;
    out.tables.push_back(std::move(tab));
    return out;
}

}  // namespace

ExperimentConfig figure_defaults(int figure, bool heavy) {
    require(figure >= 3 && figure <= 12, "figure must be 3..12");
    ExperimentConfig c;
    c.figure = figure;
    c.scenario = "fig" + std::to_string(figure);
    c.heavy = heavy;
    c.k = 2;
    c.m = 64;
    c.gamma_dbm = 10.0;
    switch (figure) {
        case 3:
            c.k = 1;
            c.trials = heavy ? 200 : 50;
            c.fading_draws = heavy ? 1000 : 200;
            c.protocol = ProtocolMode::hybrid;
            break;
        case 4:
            c.trials = heavy ? 200 : 50;
            break;
        case 5:
        case 6:
            c.trials = heavy ? 200 : 100;
            c.fading_draws = heavy ? 500 : 100;
            c.policy = PolicyMode::maxmin;
            break;
        case 7:
            c.trials = 1;
            c.protocol = ProtocolMode::ts;
            c.policy = PolicyMode::maxmin;
            break;
        case 8:
            c.trials = heavy ? 5 : 1;
            c.fading_draws = heavy ? 1000 : 200;
            c.policy = PolicyMode::maxmin;
            break;
        case 9:
        case 10:
            c.trials = 1;
            c.grid_size = heavy ? 21 : 11;
            c.policy = PolicyMode::maxmin;
            c.protocol = ProtocolMode::hybrid;
            break;
        case 11:
            c.trials = heavy ? 10 : 1;
            c.protocol = ProtocolMode::hybrid;
            c.policy = PolicyMode::joint;
            break;
        case 12:
            c.trials = heavy ? 100 : 20;
            c.grid_size = heavy ? 101 : 21;
            c.fading_draws = heavy ? 1000 : 200;
            c.dl_pilots = true;
            break;
    }
    return c;
}

RunOutput run_figure(const ExperimentConfig& cfg) {
    cfg.validate();
    switch (cfg.figure) {
        case 3: return figure3(cfg);
        case 4: return figure4(cfg);
        case 5:
        case 6: return figure56(cfg);
        case 7: return figure7(cfg);
        case 8: return figure8(cfg);
        case 9:
        case 10: return figure910(cfg);
        case 11: return figure11(cfg);
        case 12: return figure12(cfg);
        default: throw std::invalid_argument("run_figure: figure must be 3..12");
    }
}

}  // namespace swipt
