#include <benchmark/benchmark.h>

#include "szego/kernel.hpp"
#include "szego/laplace.hpp"
#include "szego/parallel.hpp"

using namespace szego;

namespace {

const SublevelSet kBody{Polynomial(2, {{{2, 0}, 1.0}, {{0, 4}, 1.0}, {{1, 1}, 0.3}}), 1.0};
const Polynomial kTheta(2, {{{2, 0}, 1.0}, {{0, 4}, 1.0}, {{1, 1}, 0.3}});

std::vector<std::vector<double>> eta_axes(int points) {
  std::vector<double> ax;
  for (int i = 0; i < points; ++i) ax.push_back(-8.0 + 16.0 * i / (points - 1));
  return {ax, ax};
}

void BM_CountInsideSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(kernels::count_inside_serial(kBody, 1.5, st.range(0), 1));
}

void BM_CountInsideParallel(benchmark::State& st) {
  kernels::set_threads(static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::count_inside_parallel(kBody, 1.5, st.range(0), 1));
  kernels::set_threads(0);
}

void BM_ThetaGridSerial(benchmark::State& st) {
  const auto axes = eta_axes(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(theta_grid_serial(kTheta, axes));
}

void BM_ThetaGridParallel(benchmark::State& st) {
  kernels::set_threads(static_cast<int>(st.range(1)));
  const auto axes = eta_axes(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(theta_grid_parallel(kTheta, axes));
  kernels::set_threads(0);
}

void BM_ThetaGridTransform(benchmark::State& st) {
  const auto axes = eta_axes(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(theta_grid_transform(kTheta, axes));
}

void BM_SweepPair(benchmark::State& st) {
  kernels::set_threads(static_cast<int>(st.range(0)));
  SamplerSpec spec;
  spec.count = 1;
  const auto pairs = sample_pairs(2, spec);
  const Polynomial b(2, {{{2, 0}, 1.0}, {{0, 4}, 1.0}});
  for (auto _ : st) benchmark::DoNotOptimize(main_theorem_sweep(b, pairs));
  kernels::set_threads(0);
}

}  // namespace

BENCHMARK(BM_CountInsideSerial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CountInsideParallel)->Args({1 << 20, 1})->Args({1 << 20, 2})->Args({1 << 20, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ThetaGridSerial)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ThetaGridParallel)->Args({48, 1})->Args({48, 2})->Args({48, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ThetaGridTransform)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepPair)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->Iterations(3);

BENCHMARK_MAIN();
