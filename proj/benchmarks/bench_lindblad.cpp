#include <benchmark/benchmark.h>

#include "cqed/lindblad/correlation.hpp"
#include "cqed/lindblad/solver.hpp"
#include "cqed/lindblad/weak_drive.hpp"

using namespace cqed::lindblad;

static void BM_SteadyState(benchmark::State& state) {
  SystemParams p;
  const auto h = HilbertConfig::fock(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(transmission(p, h));
  state.counters["superop_dim"] = h.dimension() * h.dimension();
}
BENCHMARK(BM_SteadyState)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

static void BM_WeakDriveAnalytic(benchmark::State& state) {
  SystemParams p;
  for (auto _ : state) {
    benchmark::DoNotOptimize(weak_drive_analytic(p));
    p.delta_e += 1.0;
  }
}
BENCHMARK(BM_WeakDriveAnalytic);

static void BM_G2Curve(benchmark::State& state) {
  SystemParams p;
  G2Options opt;
  opt.method = state.range(0) ? Propagator::rk45 : Propagator::expm;
  opt.auto_raise = false;
  std::vector<double> tau;
  for (int i = 0; i < 50; ++i) tau.push_back(i * 0.2e-9);
  for (auto _ : state) benchmark::DoNotOptimize(g2_transmitted(p, tau, opt));
  state.SetLabel(state.range(0) ? "rk45" : "expm");
}
BENCHMARK(BM_G2Curve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
