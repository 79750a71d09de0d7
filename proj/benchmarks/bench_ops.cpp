#include <benchmark/benchmark.h>

#include "pir/operators.hpp"
#include "pir/phantoms.hpp"
#include "pir/rng.hpp"
#include "pir/solvers.hpp"

using namespace pir;

namespace {

CountGrid make_counts(int n) {
    ImageGrid f = shepp_logan(n, n);
    DegradationSpec spec;
    spec.f0 = 255.0 / 32.0;
    Kernel K = rational_kernel(2);
    return poisson_sample(apply_degradation(f, spec, &K), 7);
}

void BM_Convolve(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    Kernel K = rational_kernel(2);
    LinearOpPtr H = convolution_op(K, n, n);
    CoeffField x;
    x.bands.push_back({"img", shepp_logan(n, n)});
    for (auto _ : state) benchmark::DoNotOptimize(H->apply(x));
}
BENCHMARK(BM_Convolve)->Arg(64)->Arg(128);

void BM_TiHaarRoundtrip(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    LinearOpPtr Phi = ti_haar_op(n, n, 4);
    ImageGrid f = shepp_logan(n, n);
    for (auto _ : state) {
        CoeffField c = Phi->adjoint(f);
        benchmark::DoNotOptimize(ti_haar_synthesis(c, 4));
    }
}
BENCHMARK(BM_TiHaarRoundtrip)->Arg(64)->Arg(128);

void BM_FindMu(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    CountGrid g = make_counts(n);
    Kernel K = rational_kernel(2);
    LinearOpPtr A =
        augment_background(compose(convolution_op(K, n, n), ti_haar_op(n, n, 4)), 1.0 / n);
    CoeffField c = pis_default_init(g, *ti_haar_op(n, n, 4), 1.0 / n);
    PriorConfig prior = PriorConfig::from_gamma(0.02);
    MuSearchConfig mu_cfg;
    for (auto _ : state) benchmark::DoNotOptimize(find_mu(c, g, *A, prior, mu_cfg));
}
BENCHMARK(BM_FindMu)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_PisIterations(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    CountGrid g = make_counts(n);
    Kernel K = rational_kernel(2);
    LinearOpPtr Phi = ti_haar_op(n, n, 4);
    LinearOpPtr A = augment_background(compose(convolution_op(K, n, n), Phi), 1.0 / n);
    CoeffField c0 = pis_default_init(g, *Phi, 1.0 / n);
    PisOptions opt;
    opt.prior = PriorConfig::from_gamma(0.02);
    opt.stop = {0.0, 5};
    for (auto _ : state) benchmark::DoNotOptimize(pis_solve(g, *A, opt, c0));
    state.SetLabel("5 iterations");
}
BENCHMARK(BM_PisIterations)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_RlIterations(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    CountGrid g = make_counts(n);
    Kernel K = rational_kernel(2);
    ImageGrid init(n, n, 10.0);
    for (auto _ : state) benchmark::DoNotOptimize(rl_solve(g, K, init, 10));
    state.SetLabel("10 iterations");
}
BENCHMARK(BM_RlIterations)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
