#pragma once

#include "swipt/power_control.hpp"
#include "swipt/units.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace swipt {

enum class ProtocolMode { ts, ps, hybrid };
enum class PolicyMode { uniform, maxmin, joint };

std::string to_string(ProtocolMode p);
std::string to_string(PolicyMode p);

struct ExperimentConfig {
    int figure = 0;            // 3..12, or 0 for a plain scenario
    std::string scenario = "scenario";
    int m = 64;
    int k = 2;
    int trials = 200;          // topology draws
    int fading_draws = 500;    // small-scale draws per topology
    std::uint64_t seed = 1;
    ProtocolMode protocol = ProtocolMode::ps;
    double alpha = 0.5;
    double theta = 0.5;
    PolicyMode policy = PolicyMode::uniform;
    double gamma_dbm = 10.0;        // average DL transmit power
    double pilot_power_dbm = 20.0;  // UL pilot power
    double dl_pilot_power_dbm = 10.0;
    bool dl_pilots = false;
    double kappa = 0.85;
    int grid_size = 101;
    bool heavy = false;
    int threads = 0;  // 0: hardware concurrency
    std::string out_dir = "out";

    SystemGeometry geom;
    HarvesterParams eh;
    LinkBudget link;
    int tau_c = 196;
    PowerControlOptions solver;

    void validate() const;
    ProtocolSplit split() const;
    double p_d() const { return link.normalized_power(gamma_dbm); }
};

// Flat key=value text with namespaces run.*, geom.*, eh.*, frame.*, solver.*.
// '#' starts a comment. Unknown keys throw std::invalid_argument.
void apply_config_text(ExperimentConfig& cfg, const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
// Every key with its resolved value, in the same format.
std::string dump_config(const ExperimentConfig& cfg);

// A CSV table; cells are preformatted so output is byte-stable.
struct ResultTable {
    std::string name;  // file stem
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
    void add_row(std::vector<std::string> cells);
    std::string to_csv() const;
};

std::string format_number(double v);

struct RunOutput {
    std::vector<ResultTable> tables;
    std::map<std::string, double> summary;  // headline numbers
    int failed_trials = 0;
    std::string notes;
};

struct CdfSeries {
    std::string metric;  // "min-rate" or "min-energy"
    std::vector<double> samples;  // sorted
    std::vector<std::pair<double, double>> cdf;  // (value, F(value))

    // Empirical quantile, linear interpolation between order statistics.
    double quantile(double q) const;
    // Value exceeded with probability 0.9.
    double likely90() const { return quantile(0.1); }
};

CdfSeries make_cdf(std::string metric, std::vector<double> samples);
std::pair<CdfSeries, CdfSeries> cdf_min_metrics(std::vector<double> min_rate, std::vector<double> min_energy);

// Per-topology quantities shared by the scenario runner and the figures.
struct Topology {
    Placement placement;
    LargeScaleGains gains;
    EstimationStatistics stats;
    UplinkPilotConfig pilots;
    std::uint64_t seed = 0;
};

Topology draw_topology(const ExperimentConfig& cfg, int m, int trial, bool colocated = false);

// Every antenna at the centre; one shadowing draw per user, shared by all antennas.
LargeScaleGains colocated_gains(const SystemGeometry& geom, const Placement& placement, std::uint64_t rng_seed);

// Instantaneous received powers, normalized, one row per fading draw.
Mat sample_received_power(const Topology& topo, const Mat& eta, double p_d, int draws, std::uint64_t seed);

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

RunOutput run_scenario(const ExperimentConfig& cfg);
RunOutput colocated_baseline(const ExperimentConfig& cfg);
RunOutput run_figure(const ExperimentConfig& cfg);

// Default configuration for a figure at desk scale (heavy adds paper-scale sizes).
ExperimentConfig figure_defaults(int figure, bool heavy);

// One CSV per table plus manifest.txt with the resolved config.
std::vector<std::string> emit_plot_data(const RunOutput& out, const ExperimentConfig& cfg, const std::string& dir);

}  // namespace swipt
