#include "fft_internal.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace pir::detail {
namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::pair<int, int>, PlanPair>& plan_cache() {
    static std::map<std::pair<int, int>, PlanPair> cache;
    return cache;
}

// Plans are created once per shape with FFTW_ESTIMATE|FFTW_UNALIGNED and then
// executed on per-call buffers via the new-array interface, so concurrent
// apply/adjoint calls never share workspace.
PlanPair get_plans(int h, int w) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find({h, w});
    if (it != cache.end()) return it->second;

    std::vector<double> real(static_cast<size_t>(h) * w);
    std::vector<fftw_complex> cplx(static_cast<size_t>(h) * (w / 2 + 1));
    PlanPair p;
    p.fwd = fftw_plan_dft_r2c_2d(h, w, real.data(), cplx.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_c2r_2d(h, w, cplx.data(), real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p.fwd || !p.bwd) throw std::runtime_error("fftw plan creation failed");
    cache[{h, w}] = p;
    return p;
}

}  // namespace

std::vector<std::complex<double>> rfft2(const ImageGrid& in) {
    PlanPair p = get_plans(in.h, in.w);
    std::vector<double> buf(in.v);
    std::vector<std::complex<double>> out(static_cast<size_t>(in.h) * (in.w / 2 + 1));
    fftw_execute_dft_r2c(p.fwd, buf.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

ImageGrid irfft2(std::vector<std::complex<double>> spec, int h, int w) {
    PlanPair p = get_plans(h, w);
    ImageGrid out(h, w);
    fftw_execute_dft_c2r(p.bwd, reinterpret_cast<fftw_complex*>(spec.data()), out.v.data());
    double norm = 1.0 / (static_cast<double>(h) * w);
    for (double& x : out.v) x *= norm;
    return out;
}

std::vector<std::complex<double>> kernel_hat(const Kernel& k, int h, int w) {
    ImageGrid padded(h, w, 0.0);
    for (int di = -k.D; di <= k.D; ++di) {
        int i = ((di % h) + h) % h;
        for (int dj = -k.D; dj <= k.D; ++dj) {
            int j = ((dj % w) + w) % w;
            padded.at(i, j) += k.at(di, dj);
        }
    }
    return rfft2(padded);
}

}  // namespace pir::detail
