#include <benchmark/benchmark.h>

#include "cqed/optics/cavity.hpp"

using namespace cqed::optics;

static void BM_TransferMatrix(benchmark::State& state) {
  const auto layout = build_cavity(paper_geometry());
  double lam = 619e-9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(transfer_matrix(layout.stack, lam));
    lam += 1e-15;
  }
  state.counters["layers"] = static_cast<double>(layout.stack.elements.size());
}
BENCHMARK(BM_TransferMatrix);

static void BM_OperatingPoint(benchmark::State& state) {
  const auto g = paper_geometry();
  for (auto _ : state) benchmark::DoNotOptimize(operating_point(g));
}
BENCHMARK(BM_OperatingPoint)->Unit(benchmark::kMillisecond);

static void BM_FieldProfile(benchmark::State& state) {
  const auto g = paper_geometry();
  const double lam = operating_point(g).wavelength;
  for (auto _ : state) benchmark::DoNotOptimize(effective_length(field_profile(g, lam)));
}
BENCHMARK(BM_FieldProfile)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
