#pragma once

#include <cstdint>
#include <vector>

#include "pir/grid.hpp"

namespace pir {

struct TrialSummary {
    std::uint64_t seed = 0;
    double nmse = 0.0;
    double ssim = 0.0;
    int iterations = 0;
    double wall_seconds = 0.0;
};

struct AggregateResult {
    double mean_nmse = 0.0;
    double mean_ssim = 0.0;
    double stderr_nmse = 0.0;
    double stderr_ssim = 0.0;
};

double nmse(const ImageGrid& f_true, const ImageGrid& f_est);

// Mean SSIM over valid 11x11 Gaussian-weighted (sigma 1.5) windows,
// C1 = (0.01*range)^2, C2 = (0.03*range)^2.
double ssim(const ImageGrid& f_true, const ImageGrid& f_est, double dynamic_range);

AggregateResult aggregate(const std::vector<TrialSummary>& trials);

double relative_change(const ImageGrid& f_prev, const ImageGrid& f_next);

}  // namespace pir
