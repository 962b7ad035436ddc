#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>

#include "cqed/analysis/contrast.hpp"
#include "cqed/analysis/fitters.hpp"
#include "cqed/constants.hpp"
#include "cqed/ensemble/cooperativity.hpp"
#include "cqed/ensemble/lineshape.hpp"
#include "cqed/errors.hpp"
#include "cqed/io/csv.hpp"
#include "cqed/lindblad/correlation.hpp"
#include "cqed/lindblad/solver.hpp"
#include "cqed/optics/cavity.hpp"
#include "cqed/pipeline/closure.hpp"
#include "cqed/synth/generators.hpp"

namespace cqed::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

json measured(const Measured& m) { return {{"value", m.value}, {"sigma", m.sigma}}; }

json fit_json(const analysis::FitResult& f) {
  json params = json::object();
  for (const auto& p : f.parameters) params[p.name] = {{"value", p.value}, {"sigma", p.sigma}};
  return {{"model", f.model},
          {"parameters", params},
          {"window", {f.window_begin, f.window_end}},
          {"reduced_chi2", f.reduced_chi2},
          {"dof", f.dof},
          {"success", f.success},
          {"diagnostic", f.diagnostic}};
}

json system_json(const lindblad::SystemParams& p) {
  return {{"g_hz", p.g},           {"kappa_hz", p.kappa},     {"kappa_in_hz", p.kappa_in},
          {"kappa_out_hz", p.kappa_out}, {"gamma_hz", p.gamma}, {"gamma_dp_hz", p.gamma_dp},
          {"delta_e_hz", p.delta_e}, {"delta_c_hz", p.delta_c}, {"xi_per_s", p.xi}};
}

void write_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

// Matplotlib script for a two-column CSV; text only, nothing is rendered here.
void plot_script(const Context& ctx, const std::string& name, const std::vector<std::string>& csvs,
                 const std::string& xlabel, const std::string& ylabel) {
  if (!ctx.config.plot_scripts) return;
  std::string s = "import csv\nimport matplotlib.pyplot as plt\n\nfor name in [";
  for (std::size_t i = 0; i < csvs.size(); ++i) s += (i ? ", " : "") + ("'" + csvs[i] + "'");
  s += "]:\n    with open(name) as f:\n        rows = list(csv.reader(f))[1:]\n"
       "    plt.plot([float(r[0]) for r in rows], [float(r[1]) for r in rows], label=name)\n";
  s += "plt.xlabel('" + xlabel + "')\nplt.ylabel('" + ylabel + "')\nplt.legend()\nplt.savefig('" + name +
       ".png', dpi=150)\n";
  io::write_text(ctx.out / ("plot_" + name + ".py"), s);
}

double purcell_lifetime(const io::RunConfig& cfg) {
  const auto f = pipeline::figures_of_merit(cfg, cfg.fom.natural_lifetime, cfg.fom.purcell_lifetime, cfg.fom.linewidth,
                                            cfg.fom.purcell_linewidth);
  return f.purcell_lifetime.value;
}

lindblad::SystemParams driven_system(const io::RunConfig& cfg, double photons_per_lifetime) {
  auto p = cfg.system;
  p.xi = lindblad::drive_for_photons_per_lifetime(p, photons_per_lifetime, purcell_lifetime(cfg));
  return p;
}

ensemble::DetuningWeights vibration_weights(const io::RunConfig& cfg) {
  return ensemble::gaussian_detuning_weights(cfg.vibration, cfg.vibration_points, cfg.vibration_halfwidth_sigmas);
}

std::string indexed(const std::string& stem, std::size_t k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%03zu", k);
  return stem + buf + ".csv";
}

}  // namespace

int cmd_cavity(const Context& ctx, const CavityArgs& a) {
  const auto& cfg = ctx.config;
  require(a.gap_points >= 1 && a.gap_max >= a.gap_min && a.gap_min > 0.0, "invalid gap range");
  require(a.lambda_max > a.lambda_min && a.lambda_min > 0.0, "invalid wavelength range");
  const auto d = optics::characterize(cfg.geometry, cfg.kappa, cfg.total_loss_ppm);
  const double fsr = optics::free_spectral_range(cfg.geometry, d.resonance_wavelength);
  const auto budget = optics::loss_budget(cfg.kappa, d.finesse * cfg.kappa, cfg.input_ppm, cfg.output_ppm);
  const double t_lumped = optics::empty_cavity_transmission(cfg.input_ppm, cfg.output_ppm, cfg.total_loss_ppm, 0.0,
                                                            cfg.kappa);
  json report = {
      {"input_mirror_radius_of_curvature_m", cfg.geometry.mirror_roc},
      {"cavity_air_gap_m", cfg.geometry.air_gap},
      {"diamond_thickness_m", cfg.geometry.diamond_thickness},
      {"hybrid_cavity_mode_number", d.mode_number},
      {"effective_cavity_length_m", d.effective_length},
      {"cavity_beam_waist_m", d.waist},
      {"cavity_mode_volume_lambda3", d.mode_volume_lambda3},
      {"cavity_lorentzian_linewidth_hz", d.kappa},
      {"rms_cavity_length_fluctuations_m", cfg.vibration.sigma_length},
      {"cavity_mode_dispersion_slope_hz_per_pm", std::abs(d.dispersion_slope) * 1e-12},
      {"cavity_quality_factor", d.q_factor},
      {"cavity_finesse", d.finesse},
      {"purcell_factor", d.purcell},
      {"cavity_transmission", t_lumped},
      {"details",
       {{"resonance_wavelength_m", d.resonance_wavelength},
        {"resonance_frequency_hz", d.frequency},
        {"dispersion_slope_hz_per_m", d.dispersion_slope},
        {"branch", optics::to_string(d.branch)},
        {"emitter_antinode_distance_m", d.emitter_antinode_distance},
        {"input_mirror_transmittance_ppm", d.input_transmittance_ppm},
        {"output_mirror_transmittance_ppm", d.output_transmittance_ppm},
        {"cavity_transmission_from_mirror_stacks", d.empty_transmission},
        {"total_loss_ppm", budget.total_loss_ppm},
        {"excess_loss_ppm", budget.excess_loss_ppm},
        {"loss_budget_inconsistent", budget.inconsistent},
        {"free_spectral_range_hz", fsr},
        {"finesse_from_mode_spacing", fsr / cfg.kappa}}},
  };

  std::vector<double> gaps;
  for (int i = 0; i < a.gap_points; ++i)
    gaps.push_back(a.gap_points == 1 ? a.gap_min : a.gap_min + (a.gap_max - a.gap_min) * i / (a.gap_points - 1));
  const auto disp = optics::mode_dispersion(cfg.geometry, gaps, a.lambda_min, a.lambda_max);
  if (!disp.diagnostic.empty()) report["details"]["dispersion_diagnostic"] = disp.diagnostic;
  io::write_dispersion(ctx.out / "dispersion.csv", disp);
  const auto field = optics::field_profile(cfg.geometry, d.resonance_wavelength);
  io::write_field(ctx.out / "field.csv", field);
  write_json(ctx.out / "cavity.json", report);
  plot_script(ctx, "field", {"field.csv"}, "z (m)", "n");
  std::cout << report.dump(2) << "\n";
  return ok;
}

int cmd_sim(const Context& ctx, const SimArgs& a) {
  const auto& cfg = ctx.config;
  const auto weights = vibration_weights(cfg);
  const auto* vib = a.vibration ? &weights : nullptr;
  const double tau_p = purcell_lifetime(cfg);

  if (a.kind == "spectrum") {
    std::vector<double> probe;
    for (int i = 0; i < a.probe_points; ++i) probe.push_back(-a.probe_span + 2.0 * a.probe_span * i / (a.probe_points - 1));
    const auto base = driven_system(cfg, cfg.photons_per_lifetime);
    json index = json::array();
    std::vector<std::string> files;
    for (std::size_t k = 0; k < a.emitter_cavity_detunings.size(); ++k) {
      auto p = base;
      p.delta_e = 0.0;
      p.delta_c = a.emitter_cavity_detunings[k];
      const auto s = lindblad::transmission_spectrum(p, probe, lindblad::HilbertConfig::fock(2), vib);
      const auto name = indexed("spectrum", k);
      io::write_spectrum(ctx.out / name, s);
      write_json(ctx.out / (name + ".json"), {{"system", system_json(p)},
                                             {"emitter_cavity_detuning_hz", p.delta_c},
                                             {"vibration_averaged", a.vibration},
                                             {"empty_transmission_max", lindblad::empty_transmission_max(p)}});
      index.push_back({{"file", name}, {"emitter_cavity_detuning_hz", p.delta_c}});
      files.push_back(name);
    }
    write_json(ctx.out / "spectra.json", index);
    plot_script(ctx, "spectra", files, "probe detuning (Hz)", "transmission");
    std::cout << "wrote " << files.size() << " spectra to " << ctx.out.string() << "\n";
    return ok;
  }

  if (a.kind == "g2") {
    std::vector<double> tau;
    for (int i = 0; i < a.tau_points; ++i) tau.push_back(a.tau_max * i / (a.tau_points - 1));
    const auto p = driven_system(cfg, cfg.photons_per_lifetime);
    lindblad::G2Options opt;
    opt.cutoff = cfg.fock_cutoff;
    const auto g = lindblad::g2_transmitted(p, tau, opt);
    lindblad::TriggerEmulation te;
    te.vibration = vib;
    const auto trig = lindblad::triggered_g2_zero(p, te);
    io::write_g2(ctx.out / "g2.csv", g);
    const json report = {{"system", system_json(p)},
                         {"cutoff", g.cutoff},
                         {"g2_zero", g.g2.front()},
                         {"g2_zero_triggered", trig.g2_zero},
                         {"trigger_threshold", te.threshold},
                         {"accepted_windows", std::count(trig.accepted.begin(), trig.accepted.end(), true)},
                         {"vibration_averaged", a.vibration}};
    write_json(ctx.out / "g2.csv.json", report);
    plot_script(ctx, "g2", {"g2.csv"}, "tau (s)", "g2");
    std::cout << report.dump(2) << "\n";
    return ok;
  }

  lindblad::SaturationOptions opt;
  opt.cutoff = cfg.fock_cutoff;
  opt.purcell_lifetime = tau_p;
  opt.vibration = vib;
  const auto curve = lindblad::saturation_curve(cfg.system, a.photons_per_lifetime, opt);
  io::Table t{{"photons_per_lifetime", "contrast", "t_on", "t_off", "cutoff"}, {}};
  for (const auto& s : curve)
    t.rows.push_back({io::format_double(s.photons_per_lifetime), io::format_double(s.contrast),
                      io::format_double(s.t_on), io::format_double(s.t_off), std::to_string(s.cutoff)});
  io::write_table(ctx.out / "saturation.csv", t);
  write_json(ctx.out / "saturation.csv.json",
             {{"system", system_json(cfg.system)}, {"purcell_lifetime_s", tau_p}, {"vibration_averaged", a.vibration}});
  plot_script(ctx, "saturation", {"saturation.csv"}, "photons per lifetime", "contrast");
  for (const auto& s : curve) std::cout << s.photons_per_lifetime << " " << s.contrast << "\n";
  return ok;
}

int cmd_fom(const Context& ctx) {
  const auto& cfg = ctx.config;
  const auto& in = cfg.fom;
  const auto f = pipeline::figures_of_merit(cfg, in.natural_lifetime, in.purcell_lifetime, in.linewidth,
                                            in.purcell_linewidth);
  const double sigma_nu = cfg.vibration.sigma_frequency();
  const double gauss = ensemble::gaussian_fwhm_from_sigma(sigma_nu);
  const json report = {
      {"vibration_corrected_cooperativity", measured(f.c_linewidths)},
      {"vibration_corrected_coherent_cooperativity", measured(f.c_coherent)},
      {"cooperativity_from_lifetimes", measured(f.c_lifetimes)},
      {"purcell_reduced_lifetime_s", measured(f.purcell_lifetime)},
      {"single_photon_rabi_frequency_hz", measured(f.g)},
      {"alpha_eta_lower_bound", measured(f.alpha_eta)},
      {"lifetime_limited_linewidth_hz", 1.0 / (constants::two_pi * in.natural_lifetime.value)},
      {"vibration_overlap_ratio", f.overlap_ratio},
      {"overlap_correction_used", in.overlap_correction},
      {"cavity_frequency_fluctuation_sigma_hz", sigma_nu},
      {"vibration_gaussian_fwhm_hz", gauss},
      {"vibration_averaged_cavity_linewidth_hz", ensemble::voigt_fwhm(cfg.kappa, gauss)},
      {"thermal_upper_branch_population",
       lindblad::thermal_upper_branch_population(cfg.ground_splitting, cfg.temperature)},
      {"g_denominator", in.g_denominator},
  };
  write_json(ctx.out / "fom.json", report);
  std::cout << report.dump(2) << "\n";
  return ok;
}

int cmd_fit(const Context& ctx, const FitArgs& a) {
  analysis::FitOptions opt;
  opt.weighting = a.weighting == "uniform" ? analysis::Weighting::uniform : analysis::Weighting::poisson;
  bool all_ok = true;
  for (const auto& file : a.files) {
    const fs::path path(file);
    if (!fs::exists(path)) throw ConfigError("input file '" + file + "' not found");
    json out;
    if (a.model == "exp") {
      analysis::ExpFitOptions eo;
      eo.weighting = opt.weighting;
      eo.fast_fraction = a.fast_fraction;
      out = fit_json(analysis::fit_monoexponential(io::read_histogram(path), a.window_start, eo));
    } else if (a.model == "contrast") {
      const auto c = analysis::dip_contrast(io::read_scan(path));
      out = {{"model", "dip_contrast"},
             {"contrast", c.contrast},
             {"sigma", c.sigma},
             {"depth", c.depth},
             {"baseline", c.baseline},
             {"dip_index", c.dip_index},
             {"success", true}};
    } else {
      const auto scan = io::read_scan(path);
      if (a.model == "voigt") {
        const double g = a.gaussian_fwhm >= 0.0 ? a.gaussian_fwhm
                                                : ensemble::gaussian_fwhm_from_sigma(ctx.config.vibration.sigma_frequency());
        out = fit_json(analysis::fit_voigt_fixed_gaussian(scan, g, analysis::LineMode::peak, opt));
      } else {
        const auto mode = a.model == "lorentzian-peak" ? analysis::LineMode::peak : analysis::LineMode::dip;
        out = fit_json(analysis::fit_lorentzian(scan, mode, opt));
      }
    }
    out["input"] = path.filename().string();
    all_ok = all_ok && out.value("success", false);
    write_json(ctx.out / (path.stem().string() + ".fit.json"), out);
    std::cout << path.filename().string() << ": " << out.dump() << "\n";
  }
  return all_ok ? ok : numeric_error;
}

int cmd_synth(const Context& ctx, const SynthArgs& a) {
  const auto& cfg = ctx.config;
  const auto run = pipeline::run_closure(cfg, ctx.seed);
  io::write_histogram(ctx.out / "lifetime" / "purcell.csv", run.purcell_histogram);
  io::write_histogram(ctx.out / "lifetime" / "natural.csv", run.natural_histogram);
  io::write_scan(ctx.out / "cavity" / "scan.csv", run.cavity_trace);
  for (std::size_t k = 0; k < run.ple_off_scans.size(); ++k)
    io::write_scan(ctx.out / "ple_off" / indexed("psb", k), run.ple_off_scans[k].psb);
  for (std::size_t k = 0; k < run.ple_on_scans.size(); ++k) {
    io::write_scan(ctx.out / "ple_on" / indexed("psb", k), run.ple_on_scans[k].psb);
    if (run.ple_on_scans[k].zpl) io::write_scan(ctx.out / "ple_on" / indexed("zpl", k), *run.ple_on_scans[k].zpl);
  }

  // Successive dip scans at the configured drive, with spectral diffusion and ionization.
  synth::TransmissionScanSpec spec;
  spec.grid = cfg.scan.ple_on.grid;
  spec.noise = cfg.scan.ple_on.zpl;
  const auto dips = synth::gen_transmission_series(cfg.emitter, cfg.system, spec,
                                                   pipeline::derived_seed(ctx.seed, 0, 100), a.transmission_scans);
  for (std::size_t k = 0; k < dips.size(); ++k) io::write_scan(ctx.out / "transmission" / indexed("scan", k), dips[k]);

  json truth = {{"seed", ctx.seed},
                {"natural_lifetime_s", cfg.truth.natural_lifetime * (1.0 + cfg.scan.perturbation.natural_lifetime)},
                {"purcell_lifetime_s", cfg.truth.purcell_lifetime * (1.0 + cfg.scan.perturbation.purcell_lifetime)},
                {"linewidth_hz", cfg.truth.linewidth * (1.0 + cfg.scan.perturbation.linewidth)},
                {"purcell_linewidth_hz", cfg.truth.purcell_linewidth * (1.0 + cfg.scan.perturbation.purcell_linewidth)},
                {"cavity_linewidth_hz", cfg.truth.cavity_linewidth * (1.0 + cfg.scan.perturbation.cavity_linewidth)},
                {"vibration_gaussian_fwhm_hz",
                 ensemble::gaussian_fwhm_from_sigma(cfg.vibration.sigma_frequency())},
                {"emitter_center_hz", cfg.emitter.center},
                {"diffusion_sigma_hz", cfg.emitter.diffusion_sigma},
                {"ionization_prob", cfg.emitter.ionization_prob},
                {"transmission_system", system_json(cfg.system)}};

  if (a.pl_map) {
    std::vector<double> gaps;
    for (int i = 0; i < 41; ++i) gaps.push_back(cfg.geometry.air_gap - 0.2e-6 + 0.4e-6 * i / 40);
    const double lam = cfg.geometry.wavelength;
    const auto disp = optics::mode_dispersion(cfg.geometry, gaps, lam - 4e-9, lam + 4e-9);
    synth::PlMapSpec m;
    std::vector<synth::EmitterLine> lines;
    const double nu0 = constants::c / lam;
    lines.push_back({nu0, 1.0, cfg.truth.linewidth});
    lines.push_back({constants::c / (lam + 1e-9), 0.5, cfg.truth.linewidth});
    // Strongest resonance per gap; the map uses the dominant mode only.
    for (const auto& gap : gaps) {
      const optics::ModePoint* best = nullptr;
      for (const auto& pt : disp.points)
        if (pt.gap == gap && (!best || std::abs(pt.frequency - nu0) < std::abs(best->frequency - nu0))) best = &pt;
      if (!best) continue;
      m.gaps.push_back(gap);
      m.cavity_frequency.push_back(best->frequency);
    }
    for (int j = 0; j < 201; ++j) m.frequencies.push_back(nu0 - 3e12 + 6e12 * j / 200);
    m.kappa = cfg.kappa;
    m.scale = 1000.0;
    m.background = 5.0;
    const auto map = synth::gen_pl_map(lines, m, pipeline::derived_seed(ctx.seed, 0, 101));
    io::Table t{{"gap_m", "frequency_hz", "intensity"}, {}};
    for (std::size_t i = 0; i < map.gaps.size(); ++i)
      for (std::size_t j = 0; j < map.frequencies.size(); ++j)
        t.rows.push_back({io::format_double(map.gaps[i]), io::format_double(map.frequencies[j]),
                          io::format_double(map.intensity[i][j])});
    io::write_table(ctx.out / "pl_map.csv", t);
    truth["pl_lines_hz"] = {lines[0].frequency, lines[1].frequency};
  }
  write_json(ctx.out / "truth.json", truth);
  std::cout << "wrote synthetic data to " << ctx.out.string() << "\n";
  return ok;
}

int cmd_pipeline(const Context& ctx) {
  const auto& cfg = ctx.config;
  const auto run = pipeline::run_closure(cfg, ctx.seed);
  const double n_sigma = cfg.scan.closure_sigma;

  io::Table table{{"quantity", "truth", "recovered", "sigma", "pull", "reference", "pass"}, {}};
  json quantities = json::object();
  bool pass = true;
  for (const auto& q : run.quantities) {
    const bool ok_q = q.within(n_sigma);
    pass = pass && ok_q;
    table.rows.push_back({q.name, io::format_double(q.truth), io::format_double(q.estimate), io::format_double(q.sigma),
                          io::format_double(q.pull()), io::format_double(q.reference), ok_q ? "1" : "0"});
    quantities[q.name] = {{"truth", q.truth}, {"recovered", q.estimate}, {"sigma", q.sigma},
                          {"pull", q.pull()}, {"reference", q.reference}, {"fit_ok", q.fit_ok}, {"pass", ok_q}};
  }

  auto m = [&](const char* name) {
    const auto& q = run.at(name);
    return Measured{q.estimate, q.sigma};
  };
  json figures;
  try {
    const auto rec = pipeline::figures_of_merit(cfg, m("natural_lifetime"), m("purcell_lifetime"), m("linewidth"),
                                                m("purcell_linewidth"));
    const auto ref = pipeline::figures_of_merit(cfg, exact(cfg.truth.natural_lifetime), exact(cfg.truth.purcell_lifetime),
                                                exact(cfg.truth.linewidth), exact(cfg.truth.purcell_linewidth));
    auto row = [&](const char* key, const Measured& r, const Measured& t, double reference) {
      figures[key] = {{"recovered", measured(r)}, {"truth", t.value}, {"reference", reference}};
    };
    row("cooperativity_from_lifetimes", rec.c_lifetimes, ref.c_lifetimes, 0.96);
    row("vibration_corrected_cooperativity", rec.c_linewidths, ref.c_linewidths, 1.7);
    row("vibration_corrected_coherent_cooperativity", rec.c_coherent, ref.c_coherent, 0.69);
    row("purcell_reduced_lifetime_s", rec.purcell_lifetime, ref.purcell_lifetime, 1.85e-9);
    row("single_photon_rabi_frequency_hz", rec.g, ref.g, 300e6);
    row("alpha_eta_lower_bound", rec.alpha_eta, ref.alpha_eta, 0.64);
  } catch (const ValidationError& e) {
    figures = {{"error", e.what()}};
    pass = false;
  }

  json accept = {{"ple_on_accepted", run.ple_on.accepted},
                 {"ple_on_rejected", run.ple_on.rejected},
                 {"ple_off_accepted", run.ple_off.accepted},
                 {"ple_off_rejected", run.ple_off.rejected}};
  const json report = {{"seed", ctx.seed},
                       {"closure_sigma", n_sigma},
                       {"pass", pass},
                       {"quantities", quantities},
                       {"figures_of_merit", figures},
                       {"postselection", accept},
                       {"fits",
                        {{"purcell_lifetime", fit_json(run.purcell_fit)},
                         {"natural_lifetime", fit_json(run.natural_fit)},
                         {"linewidth", fit_json(run.ple_off.fit)},
                         {"purcell_linewidth", fit_json(run.ple_on.fit)},
                         {"cavity_linewidth", fit_json(run.cavity_fit)}}}};
  io::write_table(ctx.out / "closure.csv", table);
  write_json(ctx.out / "pipeline.json", report);
  for (const auto& r : table.rows)
    std::cout << r[0] << ": truth " << r[1] << " recovered " << r[2] << " +- " << r[3] << " pull " << r[4]
              << (r[6] == "1" ? "" : "  FAIL") << "\n";
  std::cout << (pass ? "closure passed" : "closure FAILED") << "\n";
  return pass ? ok : closure_error;
}

}  // namespace cqed::cli
