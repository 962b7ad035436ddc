#include "cqed/synth/generators.hpp"

#include <cmath>
#include <random>

#include "cqed/errors.hpp"
#include "cqed/lindblad/solver.hpp"
#include "cqed/lindblad/weak_drive.hpp"
#include "cqed/parallel.hpp"
#include "cqed/synth/philox.hpp"

namespace cqed::synth {

namespace {

// Stream layout: noise of scan k uses stream k; auxiliary draws use disjoint high ranges.
constexpr std::uint64_t kChargeStreams = std::uint64_t{1} << 62;
constexpr std::uint64_t kSecondaryStreams = std::uint64_t{1} << 61;

double sample(double mean, bool poisson, Philox4x32& rng) {
  if (!poisson) return mean;
  if (mean <= 0.0) return 0.0;
  std::poisson_distribution<long long> d(mean);
  return static_cast<double>(d(rng));
}

lindblad::SystemParams emitter_system(const EmitterTruth& truth, const lindblad::SystemParams& base) {
  lindblad::SystemParams p = base;
  p.gamma_dp = truth.linewidth - base.gamma;
  require(p.gamma_dp >= -1e-9 * truth.linewidth, "emitter linewidth must be >= the natural linewidth");
  p.gamma_dp = std::max(p.gamma_dp, 0.0);
  p.validate();
  return p;
}

double model_transmission(lindblad::SystemParams q, const TransmissionScanSpec& spec) {
  auto one = [&](const lindblad::SystemParams& s) {
    if (spec.model == TransmissionModel::weak_drive) return lindblad::weak_drive_analytic(s).transmission;
    return lindblad::transmission(s, lindblad::HilbertConfig::fock(spec.cutoff));
  };
  if (!spec.vibration) return one(q);
  return ensemble::vibration_average(
      [&](double x) {
        lindblad::SystemParams s = q;
        s.delta_c += x;
        return one(s);
      },
      *spec.vibration);
}

analysis::ScanTrace transmission_trace(const lindblad::SystemParams& sys, double center, bool dark,
                                       const TransmissionScanSpec& spec, Philox4x32& rng) {
  spec.noise.validate();
  analysis::ScanTrace t;
  t.frequency = spec.grid.frequencies();
  t.integration_time = spec.noise.integration_time;
  const double tmax = lindblad::empty_transmission_max(sys);
  for (double f : t.frequency) {
    lindblad::SystemParams q = sys;
    q.delta_e = center - f;
    q.delta_c = center + spec.cavity_offset - f;
    if (dark) q.g = 0.0;
    const double rate = spec.noise.peak_rate * model_transmission(q, spec) / tmax + spec.noise.background_rate;
    t.counts.push_back(sample(rate * spec.noise.integration_time, spec.noise.poisson, rng));
  }
  return t;
}

}  // namespace

void EmitterTruth::validate() const {
  require(linewidth > 0.0, "emitter linewidth must be > 0");
  require(diffusion_sigma >= 0.0, "diffusion sigma must be >= 0");
  require(ionization_prob >= 0.0 && ionization_prob <= 1.0, "ionization probability must lie in [0, 1]");
  require(repump_success_prob >= 0.0 && repump_success_prob <= 1.0, "repump probability must lie in [0, 1]");
}

void NoiseSpec::validate() const {
  require(peak_rate >= 0.0 && background_rate >= 0.0, "rates must be >= 0");
  require(integration_time > 0.0, "integration time must be > 0");
}

std::vector<double> ScanGrid::frequencies() const {
  require(points >= 2 && stop > start, "scan grid needs >= 2 points and stop > start");
  std::vector<double> f(points);
  for (int i = 0; i < points; ++i) f[i] = start + (stop - start) * i / (points - 1);
  return f;
}

ChargeHistory simulate_charge(const EmitterTruth& truth, std::size_t scans, std::uint64_t seed) {
  truth.validate();
  ChargeHistory h;
  bool charged = true;
  bool previous_dark = false;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t k = 0; k < scans; ++k) {
    Philox4x32 rng(seed, kChargeStreams + k);
    const bool repump = truth.conditional_repump && k > 0 && previous_dark;
    const double r_repump = u(rng);
    const double r_ion = u(rng);
    const double z = n(rng);
    if (repump && r_repump < truth.repump_success_prob) charged = true;
    const bool ionizes = charged && r_ion < truth.ionization_prob;
    const bool dark = !charged || ionizes;
    if (ionizes) charged = false;
    h.dark.push_back(dark);
    h.repump_applied.push_back(repump);
    h.center.push_back(truth.center + truth.diffusion_sigma * z);
    previous_dark = dark;
  }
  return h;
}

analysis::ScanTrace gen_transmission_scan(const EmitterTruth& truth, const lindblad::SystemParams& system,
                                          const TransmissionScanSpec& spec, std::uint64_t seed,
                                          std::size_t scan_index) {
  const auto h = simulate_charge(truth, scan_index + 1, seed);
  const auto sys = emitter_system(truth, system);
  Philox4x32 rng(seed, scan_index);
  auto t = transmission_trace(sys, h.center[scan_index], h.dark[scan_index], spec, rng);
  t.metadata.scan_id = static_cast<int>(scan_index);
  t.metadata.repump_applied = h.repump_applied[scan_index];
  return t;
}

std::vector<analysis::ScanTrace> gen_transmission_series(const EmitterTruth& truth,
                                                         const lindblad::SystemParams& system,
                                                         const TransmissionScanSpec& spec, std::uint64_t seed,
                                                         std::size_t scans) {
  const auto h = simulate_charge(truth, scans, seed);
  const auto sys = emitter_system(truth, system);
  std::vector<analysis::ScanTrace> out(scans);
  parallel_for(scans, [&](std::size_t k) {
    Philox4x32 rng(seed, k);
    out[k] = transmission_trace(sys, h.center[k], h.dark[k], spec, rng);
    out[k].metadata.scan_id = static_cast<int>(k);
    out[k].metadata.repump_applied = h.repump_applied[k];
  });
  return out;
}

namespace {

analysis::PleScan ple_scan(const lindblad::SystemParams& sys, const PleScanSpec& spec, const ChargeHistory& h,
                           std::size_t k, std::uint64_t seed) {
  spec.psb.validate();
  const double offset = spec.on_resonance ? 0.0 : spec.off_resonance_detuning;
  const double center = h.center[k];
  auto population = [&](double f) {
    lindblad::SystemParams q = sys;
    q.delta_e = center - f;
    q.delta_c = center + offset - f;
    return lindblad::weak_drive_analytic(q).excited;
  };
  const double peak = population(center);
  analysis::PleScan out;
  auto& psb = out.psb;
  psb.frequency = spec.grid.frequencies();
  psb.integration_time = spec.psb.integration_time;
  psb.metadata.scan_id = static_cast<int>(k);
  psb.metadata.repump_applied = h.repump_applied[k];
  Philox4x32 rng(seed, k);
  for (double f : psb.frequency) {
    const double shape = h.dark[k] ? 0.0 : population(f) / peak;
    const double rate = spec.psb.peak_rate * shape + spec.psb.background_rate;
    psb.counts.push_back(sample(rate * spec.psb.integration_time, spec.psb.poisson, rng));
  }
  if (spec.on_resonance) {
    TransmissionScanSpec ts;
    ts.grid = spec.grid;
    ts.noise = spec.zpl;
    ts.cavity_offset = 0.0;
    Philox4x32 zrng(seed, kSecondaryStreams + k);
    auto z = transmission_trace(sys, center, h.dark[k], ts, zrng);
    z.metadata = psb.metadata;
    out.zpl = std::move(z);
  }
  return out;
}

}  // namespace

std::vector<analysis::PleScan> gen_ple_series(const EmitterTruth& truth, const lindblad::SystemParams& system,
                                              const PleScanSpec& spec, std::uint64_t seed, std::size_t scans) {
  const auto h = simulate_charge(truth, scans, seed);
  const auto sys = emitter_system(truth, system);
  std::vector<analysis::PleScan> out(scans);
  parallel_for(scans, [&](std::size_t k) { out[k] = ple_scan(sys, spec, h, k, seed); });
  return out;
}

analysis::PleScan gen_ple_scan(const EmitterTruth& truth, const lindblad::SystemParams& system,
                               const PleScanSpec& spec, std::uint64_t seed, std::size_t scan_index) {
  const auto h = simulate_charge(truth, scan_index + 1, seed);
  return ple_scan(emitter_system(truth, system), spec, h, scan_index, seed);
}

analysis::HistogramTrace gen_lifetime_histogram(double tau, const HistogramSpec& s, std::uint64_t seed,
                                                std::size_t stream) {
  require(tau > 0.0, "lifetime must be > 0");
  require(s.bins > 0 && s.bin_width > 0.0, "histogram needs bins > 0 and bin width > 0");
  require(s.amplitude >= 0.0 && s.fast_amplitude >= 0.0 && s.background >= 0.0, "histogram amplitudes must be >= 0");
  require(s.fast_amplitude == 0.0 || s.fast_decay > 0.0, "fast decay time must be > 0");
  // Expected counts integrate the decay over each bin; amplitudes are per-bin rates at t0.
  auto integral = [&](double a, double b, double decay) {
    a = std::max(a, s.excitation_time);
    if (b <= a) return 0.0;
    return decay / s.bin_width *
           (std::exp(-(a - s.excitation_time) / decay) - std::exp(-(b - s.excitation_time) / decay));
  };
  analysis::HistogramTrace h;
  h.bin_width = s.bin_width;
  Philox4x32 rng(seed, stream);
  for (int i = 0; i < s.bins; ++i) {
    const double a = i * s.bin_width, b = a + s.bin_width;
    double mean = s.background + s.amplitude * integral(a, b, tau);
    if (s.fast_amplitude > 0.0) mean += s.fast_amplitude * integral(a, b, s.fast_decay);
    h.time.push_back(a);
    h.counts.push_back(sample(mean, s.poisson, rng));
  }
  return h;
}

PlMap gen_pl_map(const std::vector<EmitterLine>& lines, const PlMapSpec& spec, std::uint64_t seed) {
  require(spec.gaps.size() == spec.cavity_frequency.size(), "one cavity frequency per gap required");
  require(spec.kappa > 0.0 && spec.scale >= 0.0 && spec.background >= 0.0, "invalid PL map settings");
  for (const auto& l : lines) require(l.strength >= 0.0 && l.linewidth >= 0.0, "invalid emitter line");
  PlMap m;
  m.gaps = spec.gaps;
  m.frequencies = spec.frequencies;
  m.intensity.assign(spec.gaps.size(), std::vector<double>(spec.frequencies.size(), 0.0));
  auto lorentz = [](double x, double fwhm) {
    const double u = 2.0 * x / fwhm;
    return 1.0 / (1.0 + u * u);
  };
  parallel_for(spec.gaps.size(), [&](std::size_t i) {
    const double nc = spec.cavity_frequency[i];
    double coupling = 0.0;
    for (const auto& l : lines) coupling += l.strength * lorentz(l.frequency - nc, spec.kappa + l.linewidth);
    Philox4x32 rng(seed, i);
    for (std::size_t j = 0; j < spec.frequencies.size(); ++j) {
      const double mean = spec.scale * coupling * lorentz(spec.frequencies[j] - nc, spec.kappa) + spec.background;
      m.intensity[i][j] = sample(mean, spec.poisson, rng);
    }
  });
  return m;
}

}  // namespace cqed::synth
