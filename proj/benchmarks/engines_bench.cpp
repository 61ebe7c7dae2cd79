#include <benchmark/benchmark.h>

#include "fredholm/index_engines.hpp"
#include "fredholm/symbol.hpp"

namespace {

using namespace fredholm;

const Symbol kSymbol({0.3, -0.2, 1.0, 0.4, 0.1}, -2);

void BM_WindingPhaseUnwrap(benchmark::State& state) {
  const UnitCircleGrid grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(winding_phase_unwrap(kSymbol, grid));
}
BENCHMARK(BM_WindingPhaseUnwrap)->Arg(256)->Arg(1024)->Arg(4096);

void BM_WindingContour(benchmark::State& state) {
  const UnitCircleGrid grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(winding_contour(kSymbol, grid));
}
BENCHMARK(BM_WindingContour)->Arg(256)->Arg(1024)->Arg(4096);

void BM_KernelDimension(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernel_dimension(kSymbol, n, 4, 1e-8));
}
BENCHMARK(BM_KernelDimension)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_KTheoretic(benchmark::State& state) {
  const int bandwidth = static_cast<int>(state.range(0));
  const UnitCircleGrid grid(4096);
  for (auto _ : state) benchmark::DoNotOptimize(index_ktheoretic(kSymbol, bandwidth, grid));
}
BENCHMARK(BM_KTheoretic)->Arg(64)->Arg(128)->Arg(256);

void BM_IndexOfShift(benchmark::State& state) {
  const LadderConfig ladder;
  const UnitCircleGrid grid(kDefaultGridSize);
  for (auto _ : state) benchmark::DoNotOptimize(index_of_spec(OperatorSpec::shift(), ladder, grid));
}
BENCHMARK(BM_IndexOfShift)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
