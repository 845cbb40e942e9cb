#include "swipt/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace swipt {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void ResultTable::add_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    add_row(std::move(cells));
}

void ResultTable::add_row(std::vector<std::string> cells) {
    require(cells.size() == header.size(), "table " + name + ": row width differs from header");
    rows.push_back(std::move(cells));
}

std::string ResultTable::to_csv() const {
    std::string s;
    auto line = [&](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) s += ',';
            s += cells[i];
        }
        s += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return s;
}

double CdfSeries::quantile(double q) const {
    require(!samples.empty(), "cdf: no samples");
    require(q >= 0 && q <= 1, "cdf: quantile outside [0, 1]");
    const double pos = q * (samples.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = std::min(lo + 1, samples.size() - 1);
    const double f = pos - lo;
    return samples[lo] * (1 - f) + samples[hi] * f;
}

CdfSeries make_cdf(std::string metric, std::vector<double> samples) {
    for (double v : samples) require(std::isfinite(v), "cdf: non-finite sample");
    CdfSeries c;
    c.metric = std::move(metric);
    std::sort(samples.begin(), samples.end());
    c.samples = std::move(samples);
    const double n = static_cast<double>(c.samples.size());
    for (size_t i = 0; i < c.samples.size(); ++i) {
        // Ties collapse onto the last index so the CDF is right-continuous.
        if (i + 1 < c.samples.size() && c.samples[i + 1] == c.samples[i]) continue;
        c.cdf.emplace_back(c.samples[i], (i + 1) / n);
    }
    return c;
}

std::pair<CdfSeries, CdfSeries> cdf_min_metrics(std::vector<double> min_rate, std::vector<double> min_energy) {
    return {make_cdf("min-rate", std::move(min_rate)), make_cdf("min-energy", std::move(min_energy))};
}

LargeScaleGains colocated_gains(const SystemGeometry& geom, const Placement& placement, std::uint64_t rng_seed) {
    geom.validate();
    Mat d = distances(geom, placement);
    Rng rng = make_rng(rng_seed, 3);
    std::normal_distribution<double> phi(0.0, geom.shadowing_std_db());
    LargeScaleGains g;
    g.zeta.resize(d.rows(), d.cols());
    for (int k = 0; k < d.cols(); ++k) {
        const double shadow_db = geom.shadowing_variance > 0 ? phi(rng) : 0.0;
        const double z = path_loss(geom, d(0, k)) * std::pow(10.0, shadow_db / 10.0);
        g.zeta.col(k).setConstant(z);
    }
    return g;
}

Topology draw_topology(const ExperimentConfig& cfg, int m, int trial, bool colocated) {
    Topology t;
    t.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(trial));
    if (colocated) {
        t.placement = place_colocated(cfg.geom, m, cfg.k, t.seed);
        t.gains = colocated_gains(cfg.geom, t.placement, t.seed);
    } else {
        t.placement = place_nodes(cfg.geom, m, cfg.k, t.seed);
        t.gains = large_scale_gains(cfg.geom, t.placement, t.seed);
    }
    t.pilots = {cfg.k, cfg.link.normalized_power(cfg.pilot_power_dbm)};
    t.stats = estimation_statistics(t.gains, t.pilots);
    return t;
}

Mat sample_received_power(const Topology& topo, const Mat& eta, double p_d, int draws, std::uint64_t seed) {
    const int K = topo.gains.k();
    Rng rng = make_rng(seed, 20);
    Mat out(draws, K);
    for (int d = 0; d < draws; ++d) {
        ChannelRealization ch = draw_channel(topo.gains, rng);
        ChannelEstimate est = estimate_uplink(ch, topo.pilots, rng);
        CVec q = draw_symbols(K, rng);
        out.row(d) = instantaneous_received_power(ch, est, eta, p_d, q).transpose();
    }
    return out;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

namespace {

struct TrialMetrics {
    bool ok = false;
    std::string error;
    Vec sinr, rate, rate_pilots, avg_power, energy_jensen, energy_mc, ul_sinr, ul_rate;
    std::vector<double> min_energy_draws;
    int solver_failures = 0;
};

TrialMetrics evaluate_trial(const ExperimentConfig& cfg, const Topology& topo) {
    TrialMetrics t;
    const ProtocolSplit split = cfg.split();
    const double p_d = cfg.p_d(), noise_w = cfg.link.noise_w();
    const auto& st = topo.stats;
    const auto& g = topo.gains;
    const int K = cfg.k;

    PowerAllocation uni = uniform_allocation(st);
    Mat eta_rate = uni.eta_dl, eta_energy = uni.eta_dl;
    Vec eta_ul = uni.eta_ul;
    UplinkEnergyBudget budget;
    budget.kappa = cfg.kappa;
    Vec p_ul;
    const double share = split.tau_d * (split.alpha_ts + (1 - split.alpha_ts) * split.theta_ps);

    switch (cfg.policy) {
        case PolicyMode::uniform: break;
        case PolicyMode::maxmin: {
            MaxminResult e = maxmin_energy(st, g, p_d, cfg.solver);
            MaxminResult r = maxmin_rate(st, g, p_d, split.theta_ps, cfg.solver);
            eta_energy = e.alloc.eta_dl;
            eta_rate = r.alloc.eta_dl;
            t.solver_failures = e.solver_failures + r.solver_failures;
            break;
        }
        case PolicyMode::joint: {
            JointResult j = joint_dl_ul(st, g, p_d, split, budget, cfg.solver);
            eta_energy = eta_rate = j.alloc.eta_dl;
            eta_ul = j.alloc.eta_ul;
            p_ul = j.p_ul;
            t.solver_failures = j.stage1.solver_failures + j.stage2.solver_failures;
            break;
        }
    }

    t.sinr = dl_sinr_statistical(st, g, eta_rate, p_d, split.theta_ps);
    t.rate = dl_rate(t.sinr, split);
    if (cfg.dl_pilots) {
        DownlinkPilotConfig dlp{K, cfg.link.normalized_power(cfg.dl_pilot_power_dbm)};
        t.rate_pilots = dl_rate_with_pilots(st, g, eta_rate, p_d, split, dlp);
    } else {
        t.rate_pilots = Vec::Constant(K, std::nan(""));
    }
    t.avg_power = average_received_power(st, g, eta_energy, p_d);
    t.energy_jensen.resize(K);
    for (int k = 0; k < K; ++k)
        t.energy_jensen(k) = average_harvested_energy_ub(t.avg_power(k) * noise_w, split, cfg.eh);

    Mat p = sample_received_power(topo, eta_energy, p_d, cfg.fading_draws, topo.seed);
    t.energy_mc = Vec::Zero(K);
    t.min_energy_draws.reserve(cfg.fading_draws);
    for (int d = 0; d < p.rows(); ++d) {
        double mn = std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k) {
            const double e = instantaneous_harvested_energy(p(d, k) * noise_w, split, cfg.eh);
            t.energy_mc(k) += e;
            mn = std::min(mn, e);
        }
        t.min_energy_draws.push_back(mn);
    }
    t.energy_mc /= static_cast<double>(p.rows());

    if (p_ul.size() == 0) {
        p_ul.resize(K);
        for (int k = 0; k < K; ++k) p_ul(k) = ul_transmit_power(share * t.avg_power(k), budget, split);
    }
    t.ul_sinr = ul_sinr(st, g, p_ul, eta_ul);
    t.ul_rate = ul_rate(t.ul_sinr, split);
    t.ok = true;
    return t;
}

RunOutput run_trials(const ExperimentConfig& cfg, bool colocated) {
    cfg.validate();
    std::vector<TrialMetrics> res(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](int i) {
        try {
            res[i] = evaluate_trial(cfg, draw_topology(cfg, cfg.m, i, colocated));
        } catch (const std::exception& e) {
            res[i].ok = false;
            res[i].error = e.what();
        }
    });

    const std::string stem = cfg.scenario + (colocated ? "_colocated" : "");
    RunOutput out;
    ResultTable users{stem + "_users",
                      {"trial", "k", "sinr", "rate_bps_hz", "rate_dl_pilots_bps_hz", "avg_power_w",
                       "energy_jensen_mj", "energy_mc_mj", "ul_sinr", "ul_rate_bps_hz"},
                      {}};
    std::vector<double> min_rate, min_energy;
    int solver_failures = 0;
    for (int i = 0; i < cfg.trials; ++i) {
        const auto& t = res[i];
        if (!t.ok) {
            ++out.failed_trials;
            out.notes += "trial " + std::to_string(i) + " failed: " + t.error + "\n";
            continue;
        }
        solver_failures += t.solver_failures;
        for (int k = 0; k < cfg.k; ++k)
            users.add_row({double(i), double(k), t.sinr(k), t.rate(k), t.rate_pilots(k),
                           t.avg_power(k) * cfg.link.noise_w(), cfg.link.to_mj(t.energy_jensen(k)),
                           cfg.link.to_mj(t.energy_mc(k)), t.ul_sinr(k), t.ul_rate(k)});
        min_rate.push_back(t.rate.minCoeff());
        for (double e : t.min_energy_draws) min_energy.push_back(cfg.link.to_mj(e));
    }
    out.tables.push_back(std::move(users));
    out.summary["failed_trials"] = out.failed_trials;
    out.summary["solver_failures"] = solver_failures;
    if (!min_rate.empty()) {
        auto [cr, ce] = cdf_min_metrics(min_rate, min_energy);
        ResultTable tr{stem + "_cdf_min_rate", {"min_rate_bps_hz", "cdf"}, {}};
        for (auto [v, f] : cr.cdf) tr.add_row({v, f});
        ResultTable te{stem + "_cdf_min_energy", {"min_energy_mj", "cdf"}, {}};
        for (auto [v, f] : ce.cdf) te.add_row({v, f});
        out.tables.push_back(std::move(tr));
        out.tables.push_back(std::move(te));
        out.summary["likely90_min_rate"] = cr.likely90();
        out.summary["likely90_min_energy_mj"] = ce.likely90();
        double sr = 0, se = 0;
        for (double v : cr.samples) sr += v;
        for (double v : ce.samples) se += v;
        out.summary["mean_min_rate"] = sr / cr.samples.size();
        out.summary["mean_min_energy_mj"] = se / ce.samples.size();
    }
    return out;
}

}  // namespace

RunOutput run_scenario(const ExperimentConfig& cfg) { return run_trials(cfg, false); }

RunOutput colocated_baseline(const ExperimentConfig& cfg) { return run_trials(cfg, true); }

std::vector<std::string> emit_plot_data(const RunOutput& out, const ExperimentConfig& cfg, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("output: cannot create " + dir + ": " + ec.message());
    std::vector<std::string> written;
    auto write = [&](const std::string& name, const std::string& body) {
        const std::string path = (fs::path(dir) / name).string();
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("output: cannot open " + path);
        f << body;
        if (!f) throw std::runtime_error("output: write failed for " + path);
        written.push_back(path);
    };
    for (const auto& t : out.tables) write(t.name + ".csv", t.to_csv());
    std::string manifest = "# resolved configuration\n" + dump_config(cfg);
    manifest += "# energies in mJ assume a symbol time of 1/bandwidth = " + format_number(cfg.link.symbol_time_s()) +
                " s\n# summary\n";
    for (const auto& [k, v] : out.summary) manifest += "summary." + k + " = " + format_number(v) + "\n";
    if (!out.notes.empty()) {
        manifest += "# notes\n";
        std::istringstream notes(out.notes);
        std::string line;
        while (std::getline(notes, line)) manifest += "# " + line + "\n";
    }
    write("manifest.txt", manifest);
    return written;
}

}  // namespace swipt
