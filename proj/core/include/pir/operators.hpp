#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pir/grid.hpp"

namespace pir {

// Blur kernel on a (2D+1)x(2D+1) support. Taps are strictly positive and
// normalized to unit sum (mean preserving PSF).
struct Kernel {
    int D = 0;
    std::vector<double> taps;  // row-major over di,dj in [-D,D]

    double at(int di, int dj) const { return taps[static_cast<size_t>(di + D) * (2 * D + 1) + (dj + D)]; }
    double& at(int di, int dj) { return taps[static_cast<size_t>(di + D) * (2 * D + 1) + (dj + D)]; }
};

// cutoff_freq in (0, pi) is the -3 dB point of the amplitude response:
// sigma = sqrt(ln 2)/cutoff. radius 0 selects the default ceil(4*sigma).
Kernel gaussian_kernel(double cutoff_freq, int radius = 0);
Kernel rational_kernel(int D);
Kernel delta_kernel();

ImageGrid convolve(const ImageGrid& f, const Kernel& h);
ImageGrid convolve_adjoint(const ImageGrid& y, const Kernel& h);

struct ShapeDesc {
    int h = 0, w = 0;
};

struct CoeffShape {
    std::vector<std::string> band_ids;
    int h = 0, w = 0;
    bool has_background = false;

    CoeffField zeros() const;
};

class LinearOp {
public:
    virtual ~LinearOp() = default;
    virtual ImageGrid apply(const CoeffField& c) const = 0;
    virtual CoeffField adjoint(const ImageGrid& y) const = 0;
    virtual CoeffShape input_shape() const = 0;
    virtual ShapeDesc output_shape() const = 0;
};

using LinearOpPtr = std::shared_ptr<const LinearOp>;

// Single-band identity "frame" (coefficients are pixels); scale != 1 mostly
// serves the operator-norm tests.
LinearOpPtr identity_op(int h, int w, double scale = 1.0);
LinearOpPtr convolution_op(const Kernel& k, int h, int w);
LinearOpPtr ti_haar_op(int h, int w, int levels);

// Undecimated 2-D Haar transform, 3*levels detail bands + one approximation
// band, filters scaled so the frame is tight with bound 1: synthesis is the
// exact left inverse of analysis.
ImageGrid ti_haar_synthesis(const CoeffField& c, int levels);
CoeffField ti_haar_analysis(const ImageGrid& f, int levels);

LinearOpPtr compose(LinearOpPtr H_op, LinearOpPtr Phi_op);

// Augmented operator: apply(c) = A[c] + atom_scale*background*1,
// adjoint(y) = (A*[y], atom_scale*sum(y)). atom_scale 1 is the plain
// all-ones column; the driver may rescale the column to unit l2 norm.
LinearOpPtr augment_background(LinearOpPtr A, double atom_scale = 1.0);

double operator_norm_sq(const LinearOp& A, int iterations, std::uint64_t seed);

ImageGrid from_single_band(const CoeffField& c);
CoeffField to_single_band(const ImageGrid& f);

}  // namespace pir
