#include <benchmark/benchmark.h>

#include "cqed/analysis/fitters.hpp"
#include "cqed/ensemble/lineshape.hpp"
#include "cqed/synth/generators.hpp"

using namespace cqed;

namespace {

analysis::ScanTrace voigt_trace() {
  ensemble::LineshapeParams p{6.86e9, 2.92e9, 0.3e9, 1e4, 5.0};
  analysis::ScanTrace t;
  for (int i = 0; i < 301; ++i) {
    const double f = -30e9 + 0.2e9 * i;
    t.frequency.push_back(f);
    t.counts.push_back(std::round(ensemble::lineshape_eval(p, f)));
  }
  return t;
}

}  // namespace

static void BM_LorentzianFit(benchmark::State& state) {
  synth::EmitterTruth e;
  lindblad::SystemParams sys;
  synth::PleScanSpec spec;
  spec.psb = {400.0, 20.0, 50e-3, true};
  const auto scan = synth::gen_ple_scan(e, sys, spec, 1);
  for (auto _ : state) benchmark::DoNotOptimize(analysis::fit_lorentzian(scan.psb, analysis::LineMode::peak));
}
BENCHMARK(BM_LorentzianFit)->Unit(benchmark::kMicrosecond);

static void BM_VoigtFit(benchmark::State& state) {
  const auto t = voigt_trace();
  for (auto _ : state) benchmark::DoNotOptimize(analysis::fit_voigt_fixed_gaussian(t, 2.92e9));
}
BENCHMARK(BM_VoigtFit)->Unit(benchmark::kMillisecond);

static void BM_ExponentialFit(benchmark::State& state) {
  synth::HistogramSpec s;
  s.amplitude = 4000.0;
  s.fast_amplitude = 4000.0;
  s.background = 2.0;
  const auto h = synth::gen_lifetime_histogram(2.55e-9, s, 1);
  for (auto _ : state) benchmark::DoNotOptimize(analysis::fit_monoexponential(h));
}
BENCHMARK(BM_ExponentialFit)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
