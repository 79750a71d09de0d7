#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pir/config.hpp"
#include "pir/metrics.hpp"
#include "pir/operators.hpp"

namespace pir {

// Resolve the config's phantom / kernel blocks (sparse phantoms draw from the
// master seed; kernel_type "none" yields nullopt).
ImageGrid phantom_from_config(const ExperimentConfig& cfg);
std::optional<Kernel> kernel_from_config(const ExperimentConfig& cfg);

struct ExperimentResult {
    std::vector<TrialSummary> trials;
    AggregateResult agg;
    std::string out_dir;
    std::vector<double> background_levels;  // per trial, coefficient solvers only
};

// Full pipeline: phantom -> degradation -> per-trial Poisson draw -> solver ->
// metrics -> artifacts. Deterministic: trial seed = master seed + trial index.
// Artifacts per run: truth.csv/.pgm, counts_<t>.pgm, recon_<t>.csv/.pgm,
// trace_<t>.csv, summary.csv.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace pir
