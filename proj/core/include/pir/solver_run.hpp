#pragma once

#include <optional>

#include "pir/config.hpp"
#include "pir/grid.hpp"
#include "pir/solvers.hpp"

namespace pir {

struct SolverRun {
    ImageGrid recon;  // evaluation estimand: Phi[c] for coefficient solvers, iterate for RL/RLTV
    SolveTrace trace;
    int iterations = 0;
    std::optional<double> background_level;
};

// One solver invocation on given counts, per the config's solver block.
SolverRun run_solver(const ExperimentConfig& cfg, const CountGrid& g, const ImageGrid* truth);

}  // namespace pir
