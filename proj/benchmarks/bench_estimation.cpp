#include "taraarch/estimation.hpp"
#include "taraarch/simulate.hpp"

#include <benchmark/benchmark.h>

using namespace taraarch;

namespace {

ModelSpec reference() {
    Eigen::MatrixXd phi(2, 2);
    phi << 0.2, 0.5, -0.3, -0.4;
    return {ThresholdPartition(1, {0.0}), TarParams(phi), AarchParams(0.1, {0.4}, {0.2})};
}

TimeSeries sample(std::size_t n) { return simulate_path(reference(), SimConfig{.n = n, .seed = 1}).series; }

void BM_Simulate(benchmark::State& state) {
    const auto spec = reference();
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_path(spec, SimConfig{.n = n, .seed = 1}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Qll(benchmark::State& state) {
    const auto spec = reference();
    const auto series = sample(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(gaussian_qll(spec, series));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ThetaStep(benchmark::State& state) {
    const auto spec = reference();
    const auto series = sample(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(theta_step(series, spec.partition(), spec.aarch(), spec.tar()));
}

void BM_AlphaStep(benchmark::State& state) {
    const auto spec = reference();
    const auto series = sample(static_cast<std::size_t>(state.range(0)));
    const AarchParams start(0.15, {0.3}, {0.0});
    for (auto _ : state) benchmark::DoNotOptimize(alpha_step(series, spec.partition(), spec.tar(), start));
}

void BM_Fit(benchmark::State& state) {
    const auto spec = reference();
    const auto series = sample(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fit_alternating(series, spec.partition(), 1, 1));
}

}  // namespace

BENCHMARK(BM_Simulate)->Arg(1000)->Arg(8000);
BENCHMARK(BM_Qll)->Arg(1000)->Arg(8000);
BENCHMARK(BM_ThetaStep)->Arg(1000)->Arg(8000);
BENCHMARK(BM_AlphaStep)->Arg(1000)->Arg(8000);
BENCHMARK(BM_Fit)->Arg(1000)->Arg(8000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
