#include <cstdio>
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "cqed/errors.hpp"
#include "cqed/parallel.hpp"

using namespace cqed;

int main(int argc, char** argv) {
  CLI::App app{"Cavity QED simulation and analysis toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "cqed 0.1.0");

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  app.add_option("--config", config_path, "JSON config; bare names are looked up in $CQED_CONFIG_DIR");
  app.add_option("--set", overrides, "Override a config key, e.g. --set system.g_hz=2.5e8")->take_all();
  app.add_option("--out", out, "Output directory (default: output.directory from the config)");
  app.add_option("--seed", seed, "Random seed for synthetic data");
  app.add_option("--workers", workers, "Worker threads (0: hardware concurrency)");

  cli::CavityArgs cavity;
  auto* c = app.add_subcommand("cavity", "Cavity optics report, dispersion map and field profile");
  c->add_option("--gap-min", cavity.gap_min, "Smallest air gap (m)");
  c->add_option("--gap-max", cavity.gap_max, "Largest air gap (m)");
  c->add_option("--gap-points", cavity.gap_points, "Number of gaps")->check(CLI::PositiveNumber);
  c->add_option("--lambda-min", cavity.lambda_min, "Lower wavelength bound (m)");
  c->add_option("--lambda-max", cavity.lambda_max, "Upper wavelength bound (m)");

  cli::SimArgs sim;
  auto* s = app.add_subcommand("sim", "Master-equation curves: spectrum, g2 or saturation");
  s->add_option("kind", sim.kind, "spectrum | g2 | saturation")
      ->required()
      ->check(CLI::IsMember({"spectrum", "g2", "saturation"}));
  s->add_option("--detunings", sim.emitter_cavity_detunings, "Emitter-cavity detunings for spectra (Hz)");
  s->add_option("--probe-span", sim.probe_span, "Probe detuning half-span (Hz)");
  s->add_option("--probe-points", sim.probe_points, "Probe detuning points")->check(CLI::Range(2, 100000));
  s->add_flag("!--no-vibration", sim.vibration, "Disable cavity vibration averaging");
  s->add_option("--tau-max", sim.tau_max, "Largest delay for g2 (s)");
  s->add_option("--tau-points", sim.tau_points, "Number of delays for g2")->check(CLI::Range(2, 100000));
  s->add_option("--photons", sim.photons_per_lifetime, "Drive strengths in photons per Purcell lifetime");

  auto* f = app.add_subcommand("fom", "Cooperativities and related figures of merit");

  cli::FitArgs fit;
  auto* ft = app.add_subcommand("fit", "Fit scan or histogram CSV files");
  ft->add_option("--model", fit.model, "lorentzian-peak | lorentzian-dip | voigt | exp | contrast")
      ->check(CLI::IsMember({"lorentzian-peak", "lorentzian-dip", "voigt", "exp", "contrast"}));
  ft->add_option("--gaussian-fwhm", fit.gaussian_fwhm, "Fixed Gaussian FWHM for voigt (Hz)");
  ft->add_option("--window-start", fit.window_start, "Exponential fit window start (s); automatic if omitted");
  ft->add_option("--fast-fraction", fit.fast_fraction, "Automatic window: fast excess below this fraction of the signal")
      ->check(CLI::Range(1e-6, 1.0));
  ft->add_option("--weighting", fit.weighting, "poisson | uniform")->check(CLI::IsMember({"poisson", "uniform"}));
  ft->add_option("files", fit.files, "Input CSV files")->required();

  cli::SynthArgs synth;
  auto* sy = app.add_subcommand("synth", "Write synthetic data sets with their truth");
  sy->add_flag("--pl-map", synth.pl_map, "Also write a PL map over the dispersion");
  sy->add_option("--transmission-scans", synth.transmission_scans, "Successive transmission dip scans");

  auto* p = app.add_subcommand("pipeline", "Synthesize, fit and compare against truth; exit 4 on closure failure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::ok : cli::config_error;
  }

  try {
    set_default_workers(workers);
    cli::Context ctx;
    std::optional<std::filesystem::path> path;
    if (!config_path.empty()) path = io::resolve_config_path(config_path);
    ctx.config = io::parse_config(io::load_config(path, overrides));
    ctx.out = out.empty() ? std::filesystem::path(ctx.config.output_directory) : std::filesystem::path(out);
    ctx.seed = seed;

    if (c->parsed()) return cli::cmd_cavity(ctx, cavity);
    if (s->parsed()) return cli::cmd_sim(ctx, sim);
    if (f->parsed()) return cli::cmd_fom(ctx);
    if (ft->parsed()) return cli::cmd_fit(ctx, fit);
    if (sy->parsed()) return cli::cmd_synth(ctx, synth);
    if (p->parsed()) return cli::cmd_pipeline(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::config_error;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return cli::config_error;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return cli::numeric_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::failure;
  }
  return cli::failure;
}
