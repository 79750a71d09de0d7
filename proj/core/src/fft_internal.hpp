#pragma once

#include <complex>
#include <vector>

#include "pir/grid.hpp"
#include "pir/operators.hpp"

namespace pir::detail {

// Real 2-D FFT helpers over a mutex-guarded FFTW plan cache. Spectra use the
// r2c layout: h x (w/2+1), row-major.
std::vector<std::complex<double>> rfft2(const ImageGrid& in);
ImageGrid irfft2(std::vector<std::complex<double>> spec, int h, int w);  // normalized by 1/(h*w)

// DFT of the kernel taps wrapped periodically onto an h x w grid.
std::vector<std::complex<double>> kernel_hat(const Kernel& k, int h, int w);

}  // namespace pir::detail
