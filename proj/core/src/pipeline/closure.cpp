#include "cqed/pipeline/closure.hpp"

#include <cmath>

#include "cqed/constants.hpp"
#include "cqed/ensemble/cooperativity.hpp"
#include "cqed/ensemble/lineshape.hpp"
#include "cqed/errors.hpp"
#include "cqed/lindblad/weak_drive.hpp"
#include "cqed/synth/generators.hpp"
#include "cqed/synth/philox.hpp"

namespace cqed::pipeline {

namespace {

enum Stage : std::uint32_t { purcell_hist = 1, natural_hist, ple_off, ple_on, cavity };

std::uint64_t stage_seed(std::uint64_t seed, std::uint64_t replication, Stage stage) {
  return derived_seed(seed, replication, stage);
}

Recovered recovered(std::string name, double truth, double reference, const analysis::FitResult& f,
                    const std::string& param) {
  Recovered r{std::move(name), truth, reference, 0.0, 0.0, false};
  if (!f.parameters.empty()) {
    r.estimate = std::abs(f.value(param));
    r.sigma = f.sigma(param);
  }
  r.fit_ok = f.success && std::isfinite(r.estimate) && std::isfinite(r.sigma) && r.sigma > 0.0;
  return r;
}

}  // namespace

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t replication, std::uint32_t stage) {
  const auto b = synth::Philox4x32::generate(
      {stage, static_cast<std::uint32_t>(replication), static_cast<std::uint32_t>(replication >> 32), 0x5eedu},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  return (std::uint64_t{b[0]} << 32) | b[1];
}

const Recovered& ClosureRun::at(const std::string& name) const {
  for (const auto& q : quantities)
    if (q.name == name) return q;
  throw ValidationError("no recovered quantity '" + name + "'");
}

double emitter_linewidth(const lindblad::SystemParams& p, double cavity_offset) {
  // Without coupling the cavity drive never reaches the emitter.
  if (p.g == 0.0) return p.gamma + p.gamma_dp;
  auto population = [&](double d) {
    auto q = p;
    q.delta_e = d;
    q.delta_c = d + cavity_offset;
    return lindblad::weak_drive_analytic(q).excited;
  };
  // Search each side separately; the line is asymmetric off cavity resonance.
  const double half = 0.5 * population(0.0);
  const double width = p.gamma + p.gamma_dp + 4.0 * p.g * p.g / p.kappa;
  auto edge = [&](double sign) {
    double lo = 0.0, hi = width;
    while (population(sign * hi) > half) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-9 * width; ++i) {
      const double mid = 0.5 * (lo + hi);
      (population(sign * mid) > half ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  return edge(1.0) + edge(-1.0);
}

double coupling_for_purcell_linewidth(const lindblad::SystemParams& p, double purcell_linewidth) {
  const double linewidth = p.gamma + p.gamma_dp;
  require(purcell_linewidth >= linewidth && p.kappa > 0.0, "need gamma'_P >= gamma' and kappa > 0");
  auto width = [&](double g) {
    auto q = p;
    q.g = g;
    return emitter_linewidth(q, 0.0);
  };
  double lo = 0.0, hi = std::sqrt((purcell_linewidth - linewidth) * p.kappa / 4.0);
  while (width(hi) < purcell_linewidth) hi *= 1.5;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (width(mid) < purcell_linewidth ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ClosureRun run_closure(const io::RunConfig& cfg, std::uint64_t seed, std::uint64_t replication) {
  const auto& t = cfg.truth;
  const auto& d = cfg.scan.perturbation;
  const double gen_tau = t.natural_lifetime * (1.0 + d.natural_lifetime);
  const double gen_tau_p = t.purcell_lifetime * (1.0 + d.purcell_lifetime);
  const double gen_linewidth = t.linewidth * (1.0 + d.linewidth);
  const double gen_purcell_linewidth = t.purcell_linewidth * (1.0 + d.purcell_linewidth);
  const double gen_kappa = t.cavity_linewidth * (1.0 + d.cavity_linewidth);

  ClosureRun run;

  run.purcell_histogram = synth::gen_lifetime_histogram(gen_tau_p, cfg.scan.purcell_histogram,
                                                        stage_seed(seed, replication, purcell_hist));
  analysis::ExpFitOptions exp_opt;
  exp_opt.fast_fraction = cfg.scan.fast_fraction;
  run.purcell_fit = analysis::fit_monoexponential(run.purcell_histogram, std::nullopt, exp_opt);
  run.natural_histogram = synth::gen_lifetime_histogram(gen_tau, cfg.scan.natural_histogram,
                                                        stage_seed(seed, replication, natural_hist));
  run.natural_fit = analysis::fit_monoexponential(run.natural_histogram, std::nullopt, exp_opt);

  // Emitter in the cavity: gamma from the natural lifetime, gamma_dp from the broadened linewidth.
  lindblad::SystemParams sys = cfg.system;
  sys.gamma = 1.0 / (constants::two_pi * gen_tau);
  synth::EmitterTruth emitter = cfg.emitter;
  emitter.linewidth = gen_linewidth;

  run.ple_off_scans = synth::gen_ple_series(emitter, sys, cfg.scan.ple_off, stage_seed(seed, replication, ple_off),
                                         cfg.scan.ple_off_scans);
  std::vector<analysis::ScanTrace> off_psb;
  off_psb.reserve(run.ple_off_scans.size());
  for (const auto& s : run.ple_off_scans) off_psb.push_back(s.psb);
  analysis::OffResonanceCriteria off_criteria;
  off_criteria.band_low = cfg.scan.ple_off.grid.start;
  off_criteria.band_high = cfg.scan.ple_off.grid.stop;
  run.ple_off = analysis::ple_postselect_off_resonance(off_psb, off_criteria);

  lindblad::SystemParams on_sys = sys;
  on_sys.gamma_dp = gen_linewidth - sys.gamma;
  on_sys.g = coupling_for_purcell_linewidth(on_sys, gen_purcell_linewidth);
  run.ple_on_scans = synth::gen_ple_series(emitter, on_sys, cfg.scan.ple_on, stage_seed(seed, replication, ple_on),
                                        cfg.scan.ple_on_scans);
  analysis::OnResonanceCriteria on_criteria;
  on_criteria.band_low = cfg.scan.ple_on.grid.start;
  on_criteria.band_high = cfg.scan.ple_on.grid.stop;
  run.ple_on = analysis::ple_postselect_on_resonance(run.ple_on_scans, on_criteria);

  // Empty cavity swept by the laser while the length jitters: a Voigt with the vibration Gaussian.
  const auto weights = ensemble::gaussian_detuning_weights(cfg.vibration, cfg.vibration_points,
                                                           cfg.vibration_halfwidth_sigmas);
  lindblad::SystemParams cav = cfg.system;
  cav.g = 0.0;
  cav.kappa_in = gen_kappa * sys.kappa_in / sys.kappa;
  cav.kappa_out = gen_kappa * sys.kappa_out / sys.kappa;
  cav.kappa = gen_kappa;
  synth::EmitterTruth still;
  still.center = 0.0;
  still.linewidth = gen_linewidth;
  synth::TransmissionScanSpec cavity_spec = cfg.scan.cavity_scan;
  cavity_spec.vibration = &weights;
  run.cavity_trace = synth::gen_transmission_scan(still, cav, cavity_spec, stage_seed(seed, replication, cavity));
  const double gaussian = ensemble::gaussian_fwhm_from_sigma(cfg.vibration.sigma_frequency());
  run.cavity_fit = analysis::fit_voigt_fixed_gaussian(run.cavity_trace, gaussian, analysis::LineMode::peak);

  run.quantities = {
      recovered("purcell_lifetime", t.purcell_lifetime, 2.55e-9, run.purcell_fit, "tau"),
      recovered("natural_lifetime", t.natural_lifetime, 5.0e-9, run.natural_fit, "tau"),
      recovered("linewidth", t.linewidth, 77.6e6, run.ple_off.fit, "fwhm"),
      recovered("purcell_linewidth", t.purcell_linewidth, 126e6, run.ple_on.fit, "fwhm"),
      recovered("cavity_linewidth", t.cavity_linewidth, 6.86e9, run.cavity_fit, "lorentzian_fwhm"),
  };
  return run;
}

Figures figures_of_merit(const io::RunConfig& cfg, Measured tau, Measured tau_p, Measured linewidth,
                         Measured purcell_linewidth) {
  Figures f;
  const Measured gamma{1.0 / (constants::two_pi * tau.value), tau.sigma / (constants::two_pi * tau.value * tau.value)};
  const double corr = cfg.fom.overlap_correction;
  f.c_lifetimes = ensemble::cooperativity_from_lifetimes(tau, tau_p);
  f.c_linewidths = ensemble::cooperativity_from_linewidths(purcell_linewidth, linewidth, gamma, corr);
  f.c_coherent = ensemble::coherent_cooperativity(purcell_linewidth, linewidth, corr);
  f.purcell_lifetime = ensemble::purcell_lifetime(tau, f.c_linewidths);
  const auto denom = cfg.fom.g_denominator == "broadened" ? ensemble::CooperativityDenominator::broadened
                                                           : ensemble::CooperativityDenominator::natural;
  const double lw = ensemble::linewidth_for(denom, gamma.value, linewidth.value);
  // The broadened convention pairs with the coherent cooperativity.
  const Measured c_for_g = denom == ensemble::CooperativityDenominator::natural ? f.c_linewidths : f.c_coherent;
  f.g = ensemble::g_from_cooperativity(c_for_g, cfg.kappa, lw);
  f.alpha_eta = ensemble::alpha_eta_bound(f.c_linewidths, cfg.fom.purcell_factor, cfg.fom.beta0, cfg.fom.zeta,
                                          cfg.fom.eps_max);
  const auto w = ensemble::gaussian_detuning_weights(cfg.vibration, cfg.vibration_points,
                                                     cfg.vibration_halfwidth_sigmas);
  f.overlap_ratio = ensemble::overlap_ratio(cfg.kappa, w);
  return f;
}

}  // namespace cqed::pipeline
