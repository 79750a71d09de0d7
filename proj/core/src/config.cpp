#include "pir/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace pir {
namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

const std::set<std::string> kKnownKeys = {
    "phantom", "image.height", "image.width", "phantom.density", "phantom.peak",
    "kernel.type", "kernel.cutoff", "kernel.radius", "kernel.D",
    "frame.type", "frame.levels",
    "background.f0", "snr",
    "solver", "solver.gamma", "solver.beta", "solver.alpha", "solver.nu_init",
    "solver.max_doublings", "solver.fixed_mu", "solver.rel_tol", "solver.max_iter",
    "solver.gamma_tv", "solver.sigma_sq", "solver.report_best",
    "background.atom_scale", "background.penalized",
    "trials", "seed", "out_dir", "metrics.dynamic_range",
};

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (...) {
        throw ConfigError("config key '" + key + "': invalid number '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        long long d = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (...) {
        throw ConfigError("config key '" + key + "': invalid integer '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "': invalid boolean '" + v + "'");
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        kv[key] = val;
    }
    return kv;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

ExperimentConfig ExperimentConfig::from_map(const std::map<std::string, std::string>& kv) {
    for (const auto& [k, v] : kv)
        if (!kKnownKeys.count(k)) throw ConfigError("unknown config key '" + k + "'");

    ExperimentConfig c;
    auto get = [&](const std::string& k) -> const std::string* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (auto* v = get("phantom")) c.phantom = *v;
    if (auto* v = get("image.height")) c.height = static_cast<int>(to_int("image.height", *v));
    if (auto* v = get("image.width")) c.width = static_cast<int>(to_int("image.width", *v));
    if (auto* v = get("phantom.density")) c.density = to_double("phantom.density", *v);
    if (auto* v = get("phantom.peak")) c.peak = to_double("phantom.peak", *v);
    if (auto* v = get("kernel.type")) c.kernel_type = *v;
    if (auto* v = get("kernel.cutoff")) c.cutoff = to_double("kernel.cutoff", *v);
    if (auto* v = get("kernel.radius")) c.radius = static_cast<int>(to_int("kernel.radius", *v));
    if (auto* v = get("kernel.D")) c.D = static_cast<int>(to_int("kernel.D", *v));
    if (auto* v = get("frame.type")) c.frame_type = *v;
    if (auto* v = get("frame.levels")) c.levels = static_cast<int>(to_int("frame.levels", *v));
    if (auto* v = get("background.f0")) c.f0 = to_double("background.f0", *v);
    if (auto* v = get("snr")) c.snr = to_double("snr", *v);
    if (auto* v = get("solver")) c.solver = *v;
    if (auto* v = get("solver.gamma")) c.gamma = to_double("solver.gamma", *v);
    if (auto* v = get("solver.beta")) c.beta = to_double("solver.beta", *v);
    if (auto* v = get("solver.alpha")) c.alpha = to_double("solver.alpha", *v);
    if (auto* v = get("solver.nu_init")) c.nu_init = to_double("solver.nu_init", *v);
    if (auto* v = get("solver.max_doublings")) c.max_doublings = static_cast<int>(to_int("solver.max_doublings", *v));
    if (auto* v = get("solver.fixed_mu")) c.fixed_mu = to_double("solver.fixed_mu", *v);
    if (auto* v = get("solver.rel_tol")) c.rel_tol = to_double("solver.rel_tol", *v);
    if (auto* v = get("solver.max_iter")) c.max_iter = static_cast<int>(to_int("solver.max_iter", *v));
    if (auto* v = get("solver.gamma_tv")) c.gamma_tv = to_double("solver.gamma_tv", *v);
    if (auto* v = get("solver.sigma_sq")) c.sigma_sq = to_double("solver.sigma_sq", *v);
    if (auto* v = get("solver.report_best")) c.report_best = to_bool("solver.report_best", *v);
    if (auto* v = get("background.atom_scale")) c.atom_scale = *v;
    if (auto* v = get("background.penalized")) c.background_penalized = to_bool("background.penalized", *v);
    if (auto* v = get("trials")) c.trials = static_cast<int>(to_int("trials", *v));
    if (auto* v = get("seed")) c.seed = static_cast<std::uint64_t>(to_int("seed", *v));
    if (auto* v = get("out_dir")) c.out_dir = *v;
    if (auto* v = get("metrics.dynamic_range")) c.dynamic_range = to_double("metrics.dynamic_range", *v);
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    return from_map(parse_config_file(path));
}

void ExperimentConfig::validate() const {
    if (height <= 0 || width <= 0) throw ConfigError("image.height/image.width must be positive");
    if (f0.has_value() == snr.has_value())
        throw ConfigError("exactly one of background.f0 and snr must be given");
    if (f0 && !(*f0 > 0.0)) throw ConfigError("background.f0 must be positive");
    if (snr && !(*snr > 0.0)) throw ConfigError("snr must be positive");
    if (kernel_type != "gaussian" && kernel_type != "rational" && kernel_type != "none")
        throw ConfigError("kernel.type must be gaussian, rational, or none");
    if (kernel_type == "gaussian" && !(cutoff > 0.0))
        throw ConfigError("kernel.cutoff required (in (0,pi)) for kernel.type = gaussian");
    if (kernel_type == "rational" && D < 1) throw ConfigError("kernel.D >= 1 required for kernel.type = rational");
    if (frame_type != "ti_haar" && frame_type != "identity")
        throw ConfigError("frame.type must be ti_haar or identity");
    if (solver != "pis" && solver != "gis" && solver != "rl" && solver != "rltv")
        throw ConfigError("solver must be pis, gis, rl, or rltv");
    if (solver == "pis") {
        if (!gamma && !beta) throw ConfigError("solver.gamma or solver.beta required for pis");
        if (gamma && beta && std::abs(*gamma * *beta - 1.0) > 1e-9)
            throw ConfigError("solver.gamma and solver.beta are inconsistent (need gamma = 1/beta)");
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("solver.alpha must lie in (0,1)");
    }
    if (solver == "gis" && !gamma && !beta && !sigma_sq)
        throw ConfigError("gis needs solver.beta (with solver.sigma_sq defaulting to f0) or solver.gamma");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (max_iter < 1) throw ConfigError("solver.max_iter must be >= 1");
    if (atom_scale != "auto") to_double("background.atom_scale", atom_scale);
    if (phantom == "sparse" && !(density > 0.0 && density < 1.0))
        throw ConfigError("phantom.density must lie in (0,1)");
}

double ExperimentConfig::background_level() const {
    if (f0) return *f0;
    return peak / *snr;
}

}  // namespace pir
