#pragma once

#include <cstdint>
#include <optional>

#include "pir/grid.hpp"
#include "pir/operators.hpp"

namespace pir {

struct DegradationSpec {
    enum class KernelKind { none, gaussian, rational };
    KernelKind kind = KernelKind::none;
    double cutoff = 0.0;  // gaussian
    int radius = 0;       // gaussian, 0 = auto
    int D = 0;            // rational
    double f0 = 0.0;      // constant background, > 0
    std::uint64_t seed = 0;

    std::optional<Kernel> make_kernel() const;
};

ImageGrid sparse_point_phantom(int height, int width, double density, double peak, std::uint64_t seed);

// Standard 10-ellipse phantom, rescaled to [0, 255].
ImageGrid shepp_logan(int height, int width);

// lambda = H[f] + f0 (H skipped when null); errors if any entry <= 0.
ImageGrid apply_degradation(const ImageGrid& f, const DegradationSpec& spec, const Kernel* H);

}  // namespace pir
