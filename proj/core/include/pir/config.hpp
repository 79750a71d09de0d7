#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace pir {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat "dotted.key = value" text format, '#' comments.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> parse_config_file(const std::string& path);

struct ExperimentConfig {
    std::string phantom = "shepp_logan";  // sparse | shepp_logan | file path
    int height = 128, width = 128;
    double density = 0.01;
    double peak = 255.0;

    std::string kernel_type = "none";  // gaussian | rational | none
    double cutoff = 0.0;
    int radius = 0;  // 0 = auto
    int D = 0;

    std::string frame_type = "ti_haar";  // ti_haar | identity
    int levels = 4;

    std::optional<double> f0;
    std::optional<double> snr;  // exactly one of f0 / snr; f0 = peak/snr

    std::string solver = "pis";  // pis | gis | rl | rltv
    std::optional<double> gamma;
    std::optional<double> beta;
    double alpha = 0.8;
    double nu_init = 1.0;
    int max_doublings = 400;
    std::optional<double> fixed_mu;
    double rel_tol = 1e-6;
    int max_iter = 500;
    double gamma_tv = 0.002;
    std::optional<double> sigma_sq;      // gis noise variance, default f0
    std::string atom_scale = "auto";     // auto | numeric
    bool background_penalized = false;
    bool report_best = true;             // rl/rltv: summarize the NMSE-optimal iterate

    int trials = 20;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::optional<double> dynamic_range;

    static ExperimentConfig from_map(const std::map<std::string, std::string>& kv);
    static ExperimentConfig from_file(const std::string& path);
    void validate() const;
    double background_level() const;  // resolves f0/snr
};

}  // namespace pir
