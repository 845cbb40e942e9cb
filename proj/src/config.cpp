#include "swipt/experiments.hpp"

#include <fstream>
#include <functional>
#include <sstream>

namespace swipt {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        long long d = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + " expects an integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: " + key + " expects true/false, got '" + v + "'");
}

ProtocolMode parse_protocol(const std::string& v) {
    if (v == "ts") return ProtocolMode::ts;
    if (v == "ps") return ProtocolMode::ps;
    if (v == "hybrid") return ProtocolMode::hybrid;
    throw std::invalid_argument("config: protocol must be ts, ps or hybrid, got '" + v + "'");
}

PolicyMode parse_policy(const std::string& v) {
    if (v == "uniform") return PolicyMode::uniform;
    if (v == "maxmin") return PolicyMode::maxmin;
    if (v == "joint") return PolicyMode::joint;
    throw std::invalid_argument("config: policy must be uniform, maxmin or joint, got '" + v + "'");
}

struct Field {
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

#define NUM(key, expr)                                                                              \
    {key, {[](ExperimentConfig& c, const std::string& v) { c.expr = parse_double(key, v); },    \
           [](const ExperimentConfig& c) { return format_number(c.expr); }}}
#define INT(key, expr)                                                                              \
    {key, {[](ExperimentConfig& c, const std::string& v) {                                      \
               c.expr = static_cast<decltype(c.expr)>(parse_int(key, v));                       \
           },                                                                                   \
           [](const ExperimentConfig& c) { return std::to_string(c.expr); }}}
#define BOOL(key, expr)                                                                             \
    {key, {[](ExperimentConfig& c, const std::string& v) { c.expr = parse_bool(key, v); },      \
           [](const ExperimentConfig& c) { return std::string(c.expr ? "true" : "false"); }}}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> f = {
        INT("run.figure", figure),
        {"run.scenario", {[](ExperimentConfig& c, const std::string& v) { c.scenario = v; },
                          [](const ExperimentConfig& c) { return c.scenario; }}},
        INT("run.aps", m),
        INT("run.users", k),
        INT("run.trials", trials),
        INT("run.fading_draws", fading_draws),
        INT("run.seed", seed),
        {"run.protocol", {[](ExperimentConfig& c, const std::string& v) { c.protocol = parse_protocol(v); },
                          [](const ExperimentConfig& c) { return to_string(c.protocol); }}},
        NUM("run.alpha", alpha),
        NUM("run.theta", theta),
        {"run.policy", {[](ExperimentConfig& c, const std::string& v) { c.policy = parse_policy(v); },
                        [](const ExperimentConfig& c) { return to_string(c.policy); }}},
        NUM("run.gamma_dbm", gamma_dbm),
        NUM("run.pilot_power_dbm", pilot_power_dbm),
        NUM("run.dl_pilot_power_dbm", dl_pilot_power_dbm),
        BOOL("run.dl_pilots", dl_pilots),
        NUM("run.kappa", kappa),
        INT("run.grid_size", grid_size),
        BOOL("run.heavy", heavy),
        INT("run.threads", threads),
        {"run.out", {[](ExperimentConfig& c, const std::string& v) { c.out_dir = v; },
                     [](const ExperimentConfig& c) { return c.out_dir; }}},
        NUM("geom.area_side", geom.area_side_D),
        NUM("geom.d0", geom.reference_distance_d0),
        NUM("geom.nu", geom.pathloss_exponent_nu),
        NUM("geom.shadowing_variance_db2", geom.shadowing_variance),
        BOOL("geom.wrap_around", geom.wrap_around),
        NUM("eh.lambda_w", eh.lambda_sat),
        NUM("eh.mu_per_w", eh.mu_slope),
        NUM("eh.omega_w", eh.omega_turn),
        INT("frame.tau_c", tau_c),
        NUM("frame.bandwidth_hz", link.bandwidth_hz),
        NUM("frame.noise_dbm", link.noise_power_dbm),
        NUM("solver.sinr_epsilon", solver.sinr_epsilon),
        NUM("solver.energy_epsilon", solver.energy_epsilon),
        BOOL("solver.equalize", solver.equalize),
        BOOL("solver.refine_energy", solver.refine_energy),
        BOOL("solver.literal_eta_box", solver.literal_eta_box),
        BOOL("solver.printed_uplink_power", solver.printed_uplink_power),
        NUM("solver.feas_tol", solver.solver.feas_tol),
        NUM("solver.gap_tol", solver.solver.gap_tol),
        INT("solver.max_iter", solver.solver.max_iter),
        BOOL("solver.fallback", solver.solver.fallback),
    };
    return f;
}

#undef NUM
#undef INT
#undef BOOL

}  // namespace

std::string to_string(ProtocolMode p) {
    switch (p) {
        case ProtocolMode::ts: return "ts";
        case ProtocolMode::ps: return "ps";
        default: return "hybrid";
    }
}

std::string to_string(PolicyMode p) {
    switch (p) {
        case PolicyMode::uniform: return "uniform";
        case PolicyMode::maxmin: return "maxmin";
        default: return "joint";
    }
}

void ExperimentConfig::validate() const {
    require(figure == 0 || (figure >= 3 && figure <= 12), "config: figure must be 3..12");
    require(m >= 1 && k >= 1, "config: need at least one AP and one user");
    require(trials >= 1, "config: trials must be at least 1");
    require(fading_draws >= 1, "config: fading draws must be at least 1");
    require(alpha >= 0 && alpha <= 1 && theta >= 0 && theta <= 1, "config: alpha and theta must lie in [0, 1]");
    require(kappa > 0 && kappa < 1, "config: kappa must lie in (0, 1)");
    require(grid_size >= 2, "config: grid size must be at least 2");
    require(threads >= 0, "config: negative thread count");
    require(link.bandwidth_hz > 0, "config: bandwidth must be positive");
    geom.validate();
    eh.validate();
    split();
}

ProtocolSplit ExperimentConfig::split() const {
    const double a = protocol == ProtocolMode::ps ? 0.0 : alpha;
    const double t = protocol == ProtocolMode::ts ? 0.0 : theta;
    return ProtocolSplit::make(k, dl_pilots, a, t, tau_c);
}

void apply_config_text(ExperimentConfig& cfg, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto it = fields().find(key);
        if (it == fields().end())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second.set(cfg, value);
    }
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    ExperimentConfig cfg;
    apply_config_text(cfg, ss.str());
    return cfg;
}

std::string dump_config(const ExperimentConfig& cfg) {
    std::string s;
    for (const auto& [key, field] : fields()) s += key + " = " + field.get(cfg) + "\n";
    return s;
}

}  // namespace swipt
