#include "pir/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pir/rng.hpp"

namespace pir {
namespace {

struct Ellipse {
    double value, a, b, x0, y0, phi_deg;
};

// Standard Shepp-Logan intensity table (value, semi-axes, center, rotation).
const Ellipse kSheppLogan[10] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.98, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.02, 0.11, 0.31, 0.22, 0.0, -18.0},
    {-0.02, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.01, 0.21, 0.25, 0.0, 0.35, 0.0},
    {0.01, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.01, 0.046, 0.046, 0.0, -0.1, 0.0},
    {0.01, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.01, 0.023, 0.023, 0.0, -0.606, 0.0},
    {0.01, 0.023, 0.046, 0.06, -0.605, 0.0},
};

}  // namespace

std::optional<Kernel> DegradationSpec::make_kernel() const {
    switch (kind) {
        case KernelKind::none:
            return std::nullopt;
        case KernelKind::gaussian:
            return gaussian_kernel(cutoff, radius);
        case KernelKind::rational:
            return rational_kernel(D);
    }
    throw std::logic_error("DegradationSpec: unknown kernel kind");
}

ImageGrid sparse_point_phantom(int height, int width, double density, double peak, std::uint64_t seed) {
    if (!(density > 0.0 && density < 1.0)) throw std::invalid_argument("sparse_point_phantom: density in (0,1)");
    if (!(peak > 0.0)) throw std::invalid_argument("sparse_point_phantom: peak must be positive");
    long long count = static_cast<long long>(density * height * width);
    if (count < 1) throw std::invalid_argument("sparse_point_phantom: density*height*width < 1");

    Xoshiro256pp rng(seed);
    int n = height * width;
    // partial Fisher-Yates over pixel indices: first `count` entries are the
    // uniformly chosen distinct support
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (long long k = 0; k < count; ++k) {
        long long j = k + static_cast<long long>(rng.uniform01() * (n - k));
        if (j >= n) j = n - 1;
        std::swap(idx[k], idx[j]);
    }
    ImageGrid f(height, width, 0.0);
    double maxv = 0.0;
    for (long long k = 0; k < count; ++k) {
        double v = std::fabs(rng.normal());
        f.v[idx[k]] = v;
        maxv = std::max(maxv, v);
    }
    if (maxv > 0.0) {
        double s = peak / maxv;
        for (double& x : f.v) x *= s;
    } else {
        f.v[idx[0]] = peak;  // all draws were exactly zero (practically impossible)
    }
    return f;
}

ImageGrid shepp_logan(int height, int width) {
    if (height < 32 || width < 32) throw std::invalid_argument("shepp_logan: dimensions must be >= 32");
    ImageGrid f(height, width, 0.0);
    for (int i = 0; i < height; ++i) {
        double y = 1.0 - (2.0 * i + 1.0) / height;  // row 0 at the top
        for (int j = 0; j < width; ++j) {
            double x = (2.0 * j + 1.0) / width - 1.0;
            double acc = 0.0;
            for (const Ellipse& e : kSheppLogan) {
                double phi = e.phi_deg * 3.14159265358979323846 / 180.0;
                double cphi = std::cos(phi), sphi = std::sin(phi);
                double xr = (x - e.x0) * cphi + (y - e.y0) * sphi;
                double yr = -(x - e.x0) * sphi + (y - e.y0) * cphi;
                if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0) acc += e.value;
            }
            f.at(i, j) = acc;
        }
    }
    double lo = f.v[0], hi = f.v[0];
    for (double x : f.v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (hi > lo)
        for (double& x : f.v) x = (x - lo) / (hi - lo) * 255.0;
    return f;
}

ImageGrid apply_degradation(const ImageGrid& f, const DegradationSpec& spec, const Kernel* H) {
    for (double x : f.v)
        if (x < 0.0) throw std::invalid_argument("apply_degradation: phantom must be nonnegative");
    ImageGrid lam = H ? convolve(f, *H) : f;
    for (double& x : lam.v) x += spec.f0;
    for (double x : lam.v)
        if (!(x > 0.0)) throw std::invalid_argument("apply_degradation: nonpositive Poisson mean");
    return lam;
}

}  // namespace pir
