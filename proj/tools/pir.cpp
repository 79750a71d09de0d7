// Batch driver. Subcommands cover the pipeline stages individually
// (generate / degrade / restore / evaluate) and end to end (benchmark).
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pir/config.hpp"
#include "pir/experiment.hpp"
#include "pir/io.hpp"
#include "pir/metrics.hpp"
#include "pir/phantoms.hpp"
#include "pir/rng.hpp"
#include "pir/solver_run.hpp"
#include "pir/solvers.hpp"

namespace fs = std::filesystem;
using namespace pir;

namespace {

struct Overrides {
    std::string config;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App* sub, Overrides& ov, bool with_trials = true) {
    sub->add_option("--config", ov.config, "experiment config file")->required();
    if (with_trials) sub->add_option("--trials", ov.trials, "override trial count");
    sub->add_option("--seed", ov.seed, "override master seed");
    sub->add_option("--out", ov.out, "override output directory");
}

ExperimentConfig load(const Overrides& ov) {
    ExperimentConfig cfg = ExperimentConfig::from_file(ov.config);
    if (ov.trials) cfg.trials = *ov.trials;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.out) cfg.out_dir = *ov.out;
    cfg.validate();
    return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
    return (fs::path(cfg.out_dir) / name).string();
}

int cmd_generate(const Overrides& ov) {
    ExperimentConfig cfg = load(ov);
    ImageGrid f = phantom_from_config(cfg);
    write_csv_grid(out_path(cfg, "truth.csv"), f);
    write_pgm16_scaled(out_path(cfg, "truth.pgm"), f);
    std::cout << "wrote " << out_path(cfg, "truth.csv") << "\n";
    return 0;
}

int cmd_degrade(const Overrides& ov, const std::string& truth_path) {
    ExperimentConfig cfg = load(ov);
    ImageGrid f = truth_path.empty() ? phantom_from_config(cfg) : read_image(truth_path);
    auto K = kernel_from_config(cfg);
    DegradationSpec spec;
    spec.f0 = cfg.background_level();
    ImageGrid lam = apply_degradation(f, spec, K ? &*K : nullptr);
    write_csv_grid(out_path(cfg, "lambda.csv"), lam);
    for (int t = 0; t < cfg.trials; ++t) {
        CountGrid g = poisson_sample(lam, cfg.seed + static_cast<std::uint64_t>(t));
        write_pgm(out_path(cfg, "counts_" + std::to_string(t) + ".pgm"), g);
    }
    std::cout << "wrote " << cfg.trials << " count frames under " << cfg.out_dir << "\n";
    return 0;
}

int cmd_restore(const Overrides& ov, const std::string& counts_path, const std::string& truth_path) {
    ExperimentConfig cfg = load(ov);
    CountGrid g = read_pgm(counts_path);
    std::optional<ImageGrid> truth;
    if (!truth_path.empty()) truth = read_image(truth_path);
    SolverRun run;
    try {
        run = run_solver(cfg, g, truth ? &*truth : nullptr);
    } catch (SolverDomainError& e) {
        emit_trace(e.trace, out_path(cfg, "trace.csv"));
        throw;
    }
    write_csv_grid(out_path(cfg, "recon.csv"), run.recon);
    write_pgm16_scaled(out_path(cfg, "recon.pgm"), run.recon);
    emit_trace(run.trace, out_path(cfg, "trace.csv"));
    std::cout << "iterations=" << run.iterations;
    if (run.background_level) std::cout << " background=" << format_double(*run.background_level);
    if (truth) {
        double lo = truth->v[0], hi = truth->v[0];
        for (double x : truth->v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        double range = cfg.dynamic_range.value_or(hi - lo);
        std::cout << " nmse=" << format_double(nmse(*truth, run.recon))
                  << " ssim=" << format_double(ssim(*truth, run.recon, range));
    }
    std::cout << "\n";
    return 0;
}

int cmd_evaluate(const std::string& truth_path, const std::string& est_path, std::optional<double> range_opt) {
    ImageGrid f = read_image(truth_path);
    ImageGrid est = read_image(est_path);
    double lo = f.v[0], hi = f.v[0];
    for (double x : f.v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    double range = range_opt.value_or(hi - lo);
    std::cout << "nmse=" << format_double(nmse(f, est)) << " ssim=" << format_double(ssim(f, est, range))
              << "\n";
    return 0;
}

int cmd_benchmark(const Overrides& ov) {
    ExperimentConfig cfg = load(ov);
    ExperimentResult res = run_experiment(cfg);
    std::cout << "trials=" << res.trials.size() << " mean_nmse=" << format_double(res.agg.mean_nmse)
              << " mean_ssim=" << format_double(res.agg.mean_ssim) << " summary="
              << (fs::path(res.out_dir) / "summary.csv").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poisson image restoration driver"};
    app.require_subcommand(1);

    Overrides gen_ov, deg_ov, res_ov, bench_ov;
    std::string deg_truth, res_counts, res_truth, eval_truth, eval_est;
    std::optional<double> eval_range;

    CLI::App* gen = app.add_subcommand("generate", "write the ground-truth phantom");
    add_common(gen, gen_ov, false);

    CLI::App* deg = app.add_subcommand("degrade", "blur, add background, draw Poisson counts");
    add_common(deg, deg_ov);
    deg->add_option("--truth", deg_truth, "read ground truth from file instead of the config phantom");

    CLI::App* res = app.add_subcommand("restore", "run the configured solver on a count frame");
    add_common(res, res_ov, false);
    res->add_option("--counts", res_counts, "input count frame (PGM)")->required();
    res->add_option("--truth", res_truth, "ground truth for trace NMSE and final metrics");

    CLI::App* eva = app.add_subcommand("evaluate", "NMSE/SSIM between two images");
    eva->add_option("--truth", eval_truth, "ground truth image")->required();
    eva->add_option("--estimate", eval_est, "estimate image")->required();
    eva->add_option("--range", eval_range, "SSIM dynamic range (default: truth max-min)");

    CLI::App* ben = app.add_subcommand("benchmark", "full multi-trial pipeline with summary CSV");
    add_common(ben, bench_ov);

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return cmd_generate(gen_ov);
        if (deg->parsed()) return cmd_degrade(deg_ov, deg_truth);
        if (res->parsed()) return cmd_restore(res_ov, res_counts, res_truth);
        if (eva->parsed()) return cmd_evaluate(eval_truth, eval_est, eval_range);
        return cmd_benchmark(bench_ov);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // bad usage is a config error
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const SolverDomainError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
