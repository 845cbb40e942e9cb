#include "swipt/experiments.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
    CLI::App app{"Cell-free massive MIMO SWIPT simulator"};
    app.require_subcommand(1);

    CLI::App* run = app.add_subcommand("run", "Run a figure or a scenario file and write CSV plot data");
    int figure = 0;
    std::string scenario_file, out_dir, protocol, policy;
    int aps = 0, users = 0, trials = 0, threads = 0;
    std::uint64_t seed = 0;
    double alpha = 0, theta = 0, gamma_dbm = 0;
    bool heavy = false, dl_pilots = false;
    std::vector<std::string> sets;

    run->add_option("--figure", figure, "Figure to reproduce")->check(CLI::Range(3, 12));
    run->add_option("--scenario", scenario_file, "key = value scenario file")->check(CLI::ExistingFile);
    auto* o_aps = run->add_option("--aps", aps, "Number of APs M")->check(CLI::PositiveNumber);
    auto* o_users = run->add_option("--users", users, "Number of users K")->check(CLI::PositiveNumber);
    auto* o_trials = run->add_option("--trials", trials, "Topology draws")->check(CLI::PositiveNumber);
    auto* o_seed = run->add_option("--seed", seed, "Master seed");
    auto* o_proto = run->add_option("--protocol", protocol, "ts, ps or hybrid")
                        ->check(CLI::IsMember({"ts", "ps", "hybrid"}));
    auto* o_alpha = run->add_option("--alpha", alpha, "Time-switching fraction")->check(CLI::Range(0.0, 1.0));
    auto* o_theta = run->add_option("--theta", theta, "Power-splitting fraction")->check(CLI::Range(0.0, 1.0));
    auto* o_policy = run->add_option("--policy", policy, "uniform, maxmin or joint")
                         ->check(CLI::IsMember({"uniform", "maxmin", "joint"}));
    auto* o_pilots = run->add_flag("--dl-pilots", dl_pilots, "Beamformed downlink pilots");
    auto* o_gamma = run->add_option("--gamma-dbm", gamma_dbm, "Average downlink transmit power in dBm");
    auto* o_out = run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--heavy", heavy, "Paper-scale trial counts");
    auto* o_threads = run->add_option("--threads", threads, "Worker threads, 0 for all cores")
                          ->check(CLI::NonNegativeNumber);
    run->add_option("--set", sets, "Extra key=value override, repeatable");

    CLI11_PARSE(app, argc, argv);

    try {
        swipt::ExperimentConfig cfg;
        if (figure) cfg = swipt::figure_defaults(figure, heavy);
        cfg.heavy = heavy;
        if (!scenario_file.empty()) {
            std::ifstream f(scenario_file);
            std::stringstream ss;
            ss << f.rdbuf();
            swipt::apply_config_text(cfg, ss.str());
        }
        std::string text;
        auto put = [&](const char* key, const std::string& v) { text += std::string(key) + " = " + v + "\n"; };
        if (o_aps->count()) put("run.aps", std::to_string(aps));
        if (o_users->count()) put("run.users", std::to_string(users));
        if (o_trials->count()) put("run.trials", std::to_string(trials));
        if (o_seed->count()) put("run.seed", std::to_string(seed));
        if (o_proto->count()) put("run.protocol", protocol);
        if (o_alpha->count()) put("run.alpha", swipt::format_number(alpha));
        if (o_theta->count()) put("run.theta", swipt::format_number(theta));
        if (o_policy->count()) put("run.policy", policy);
        if (o_pilots->count()) put("run.dl_pilots", dl_pilots ? "true" : "false");
        if (o_gamma->count()) put("run.gamma_dbm", swipt::format_number(gamma_dbm));
        if (o_out->count()) put("run.out", out_dir);
        if (o_threads->count()) put("run.threads", std::to_string(threads));
        for (const auto& s : sets) text += s + "\n";
        swipt::apply_config_text(cfg, text);
        cfg.validate();

        const auto t0 = std::chrono::steady_clock::now();
        swipt::RunOutput out = cfg.figure ? swipt::run_figure(cfg) : swipt::run_scenario(cfg);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        for (const auto& path : swipt::emit_plot_data(out, cfg, cfg.out_dir)) std::cout << "wrote " << path << "\n";
        for (const auto& [k, v] : out.summary) std::cout << k << " = " << swipt::format_number(v) << "\n";
        std::cout << "elapsed_s = " << swipt::format_number(secs) << "\n";
        if (out.failed_trials) std::cerr << out.failed_trials << " trial(s) failed, see manifest.txt\n";
        return out.failed_trials ? 2 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
