#include <cmath>
#include <stdexcept>

#include "pir/operators.hpp"

namespace pir {
namespace {

void normalize_unit_sum(Kernel& k) {
    double s = 0.0;
    for (double t : k.taps) s += t;
    for (double& t : k.taps) t /= s;
}

}  // namespace

Kernel gaussian_kernel(double cutoff_freq, int radius) {
    constexpr double pi = 3.14159265358979323846;
    if (!(cutoff_freq > 0.0 && cutoff_freq < pi))
        throw std::invalid_argument("gaussian_kernel: cutoff must lie in (0, pi)");
    double sigma = std::sqrt(std::log(2.0)) / cutoff_freq;
    int D = radius > 0 ? radius : static_cast<int>(std::ceil(4.0 * sigma));
    Kernel k;
    k.D = D;
    k.taps.assign(static_cast<size_t>(2 * D + 1) * (2 * D + 1), 0.0);
    for (int di = -D; di <= D; ++di)
        for (int dj = -D; dj <= D; ++dj)
            k.at(di, dj) = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
    normalize_unit_sum(k);
    return k;
}

Kernel rational_kernel(int D) {
    if (D < 1) throw std::invalid_argument("rational_kernel: D must be >= 1");
    Kernel k;
    k.D = D;
    k.taps.assign(static_cast<size_t>(2 * D + 1) * (2 * D + 1), 0.0);
    for (int di = -D; di <= D; ++di)
        for (int dj = -D; dj <= D; ++dj)
            k.at(di, dj) = 1.0 / (di * di + dj * dj + 1.0);
    normalize_unit_sum(k);
    return k;
}

Kernel delta_kernel() {
    Kernel k;
    k.D = 0;
    k.taps = {1.0};
    return k;
}

}  // namespace pir
