// Serial reference vs OpenMP kernels on the Monte Carlo hot loops.
// Worker count follows PROJCOND_THREADS (default: OpenMP's choice).

#include <benchmark/benchmark.h>

#include "projcond/clones.hpp"
#include "projcond/conditional.hpp"
#include "projcond/moments.hpp"

using namespace projcond;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void label(benchmark::State& state) {
    state.SetLabel(state.range(0) == 0 ? "serial" : "parallel x" + std::to_string(thread_count()));
}

void BM_density_normalization(benchmark::State& state) {
    VectorXd x(2);
    x << 0.5, 0.0;
    for (auto _ : state) {
        Rng rng(1);
        benchmark::DoNotOptimize(clone_density_normalization(x, 50, 2, 2, 20000, rng, exec_of(state)));
    }
    state.SetItemsProcessed(state.iterations() * 20000);
    label(state);
}

void BM_monomial_mean(benchmark::State& state) {
    const auto spec = DistributionSpec::iid(Marginal::Uniform, 400);
    const auto G = MonomialSpec::make({{1, 2}, {1, 2}, {1, 3}, {1, 3}});
    for (auto _ : state) {
        Rng rng(2);
        benchmark::DoNotOptimize(estimate_monomial_mean(spec, 400, G, 20000, rng, exec_of(state)));
    }
    state.SetItemsProcessed(state.iterations() * 20000);
    label(state);
}

void BM_conditional_importance(benchmark::State& state) {
    // Bounded support: the clone acceptance rate falls geometrically in d.
    const int d = 12;
    const auto spec = DistributionSpec::iid(Marginal::Uniform, d);
    Rng setup(3);
    const auto B = haar_stiefel(d, 1, setup);
    VectorXd x(1);
    x << 0.4;
    for (auto _ : state) {
        Rng rng(4);
        benchmark::DoNotOptimize(estimate_conditional(spec, B, x, 20000, rng, true, exec_of(state)));
    }
    state.SetItemsProcessed(state.iterations() * 20000);
    label(state);
}

void BM_deviation_fourier(benchmark::State& state) {
    const int d = 128;
    const auto spec = DistributionSpec::iid(Marginal::Uniform, d);
    Rng setup(5);
    const auto B = haar_stiefel(d, 1, setup);
    for (auto _ : state) {
        Rng rng(6);
        benchmark::DoNotOptimize(
            deviation_probability(spec, B, 0.5, 32, 0, rng, InnerMethod::Fourier, exec_of(state)));
    }
    state.SetItemsProcessed(state.iterations() * 32);
    label(state);
}

}  // namespace

BENCHMARK(BM_density_normalization)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_monomial_mean)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_conditional_importance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_deviation_fourier)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
