// Acceptance suite: one PASS/FAIL line per criterion. Usage:
//   cqed_acceptance [--cli PATH] [--work DIR] [criterion ...]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cqed/analysis/contrast.hpp"
#include "cqed/constants.hpp"
#include "cqed/ensemble/cooperativity.hpp"
#include "cqed/ensemble/lineshape.hpp"
#include "cqed/io/config.hpp"
#include "cqed/lindblad/correlation.hpp"
#include "cqed/lindblad/solver.hpp"
#include "cqed/lindblad/weak_drive.hpp"
#include "cqed/optics/cavity.hpp"
#include "cqed/pipeline/closure.hpp"

namespace fs = std::filesystem;
using namespace cqed;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a check and its numbers; returns the check result.
  bool check(const std::string& what, double value, double lo, double hi) {
    const bool ok = value >= lo && value <= hi;
    pass = pass && ok;
    detail << " " << what << "=" << value << (ok ? "" : "(!)");
    return ok;
  }
  bool check(const std::string& what, bool ok) {
    pass = pass && ok;
    detail << " " << what << "=" << (ok ? "yes" : "no(!)");
    return ok;
  }
};

struct Context {
  fs::path cli;
  fs::path work = fs::temp_directory_path() / "cqed_acceptance";
  io::RunConfig cfg = io::parse_config(io::default_config());
};

bool near(Outcome& o, const std::string& what, double value, double target, double tol) {
  return o.check(what, value, target - tol, target + tol);
}

double purcell_lifetime(const io::RunConfig& cfg) {
  return pipeline::figures_of_merit(cfg, cfg.fom.natural_lifetime, cfg.fom.purcell_lifetime, cfg.fom.linewidth,
                                    cfg.fom.purcell_linewidth)
      .purcell_lifetime.value;
}

// 1. Purcell factor.
void purcell(const Context& c, Outcome& o) {
  const auto d = optics::characterize(c.cfg.geometry, c.cfg.kappa, c.cfg.total_loss_ppm);
  near(o, "F_P", d.purcell, 6.9, 0.1);
}

// 2. Gaussian mode geometry.
void geometry(const Context& c, Outcome& o) {
  const auto d = optics::characterize(c.cfg.geometry, c.cfg.kappa, c.cfg.total_loss_ppm);
  near(o, "waist_um", d.waist * 1e6, 1.24, 0.02 * 1.24);
  near(o, "V_lambda3", d.mode_volume_lambda3, 55.0, 0.05 * 55.0);
  near(o, "L_eff_um", d.effective_length * 1e6, 10.8, 0.10 * 10.8);
}

// 3. Dispersion slope and branch.
void dispersion(const Context& c, Outcome& o) {
  const auto d = optics::characterize(c.cfg.geometry, c.cfg.kappa, c.cfg.total_loss_ppm);
  near(o, "slope_MHz_per_pm", std::abs(d.dispersion_slope) * 1e-12 / 1e6, 46.0, 0.15 * 46.0);
  o.check("air_like", d.branch == optics::Branch::air_like);
  o.check("q", d.mode_number, 50, 50);
}

// 4. Vibration-averaged cooperativity ratio.
void vibration(const Context& c, Outcome& o) {
  ensemble::VibrationSpec v{27e-12, 46e6 / 1e-12};
  const auto w = ensemble::gaussian_detuning_weights(v, c.cfg.vibration_points, c.cfg.vibration_halfwidth_sigmas);
  near(o, "ratio", ensemble::overlap_ratio(6.86e9, w), 0.90, 0.01);
}

// 5. Voigt composition of the cavity line.
void voigt(const Context&, Outcome& o) {
  const double sigma = 27.0 * 46e6;
  const double g = ensemble::gaussian_fwhm_from_sigma(sigma);
  near(o, "gaussian_formula_residual", g - 2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma, 0.0, 1e-6);
  near(o, "gaussian_GHz", g / 1e9, 2.92, 0.005);
  near(o, "voigt_GHz", ensemble::voigt_fwhm(6.86e9, g) / 1e9, 8.0, 0.2);
}

// 6. Cooperativities and derived coupling.
void cooperativities(const Context&, Outcome& o) {
  const double gamma = 1.0 / (constants::two_pi * 5e-9);
  near(o, "C_lifetimes", ensemble::cooperativity_from_lifetimes({5.0e-9, 0}, {2.55e-9, 0}).value, 0.96, 0.001);
  const double c = ensemble::cooperativity_from_linewidths({126e6, 0}, {77.6e6, 0}, {32e6, 0}, 0.90).value;
  near(o, "C", c, 1.7, 0.05);
  near(o, "C_coh", ensemble::coherent_cooperativity({126e6, 0}, {77.6e6, 0}, 0.90).value, 0.69, 0.02);
  near(o, "tau_P_ns", ensemble::purcell_lifetime(5e-9, 1.7) * 1e9, 1.85, 0.01);
  near(o, "g_MHz", ensemble::g_from_cooperativity(c, 6.86e9, gamma) / 1e6, 300.0, 20.0);
}

// 7. Efficiency bound.
void efficiency(const Context& c, Outcome& o) {
  const auto f = pipeline::figures_of_merit(c.cfg, c.cfg.fom.natural_lifetime, c.cfg.fom.purcell_lifetime,
                                            c.cfg.fom.linewidth, c.cfg.fom.purcell_linewidth);
  near(o, "alpha_eta", f.alpha_eta.value, 0.64, 0.02);
}

// 8. Weak-drive oracle against the full steady state.
void weak_drive(const Context& c, Outcome& o) {
  // 1e-5 photons per tau_P; at the experimental 1.5e-3 the g = 0.6 GHz corner already saturates by ~1 %.
  constexpr double linear_photons = 1e-5;
  auto p = c.cfg.system;
  p.xi = lindblad::drive_for_photons_per_lifetime(p, linear_photons, purcell_lifetime(c.cfg));
  double worst = 0.0;
  for (double de : {-2e9, -0.5e9, 0.0, 0.5e9, 2e9})
    for (double dc : {-3e9, -1e9, 0.0, 1e9, 3e9})
      for (double g : {0.1e9, 0.3e9, 0.6e9}) {
        auto q = p;
        q.delta_e = de;
        q.delta_c = dc;
        q.g = g;
        const double full = lindblad::transmission(q, lindblad::HilbertConfig::fock(c.cfg.fock_cutoff));
        const double lin = lindblad::weak_drive_analytic(q).transmission;
        worst = std::max(worst, std::abs(full / lin - 1.0));
      }
  o.check("worst_rel_dev", worst, 0.0, 0.01);
  auto e = p;
  e.g = 0.0;
  const double tmax = 4.0 * e.kappa_in * e.kappa_out / (e.kappa * e.kappa);
  o.check("empty_Tmax_rel_dev", std::abs(lindblad::transmission(e, lindblad::HilbertConfig::fock(c.cfg.fock_cutoff)) / tmax - 1.0),
          0.0, 1e-6);
}

// 9. Dip contrast versus drive.
void dip(const Context& c, Outcome& o) {
  const auto w = ensemble::gaussian_detuning_weights(c.cfg.vibration, c.cfg.vibration_points,
                                                     c.cfg.vibration_halfwidth_sigmas);
  lindblad::SaturationOptions opt;
  opt.cutoff = c.cfg.fock_cutoff;
  opt.purcell_lifetime = purcell_lifetime(c.cfg);
  opt.vibration = &w;
  const std::vector<double> x = {0.0015, 0.01, 0.1, 0.3, 1.0, 3.0};
  const auto s = lindblad::saturation_curve(c.cfg.system, x, opt);
  near(o, "contrast@0.0015", s[0].contrast, 0.50, 0.10);
  bool monotone = true;
  for (std::size_t i = 1; i < s.size(); ++i) monotone = monotone && s[i].contrast < s[i - 1].contrast;
  o.check("monotone", monotone);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (x[i] >= 1.0) o.check("contrast@" + std::to_string(x[i]).substr(0, 3), s[i].contrast, 0.0, 0.10);
}

// 10. Photon statistics.
void statistics(const Context& c, Outcome& o) {
  auto p = c.cfg.system;
  const double tau_p = purcell_lifetime(c.cfg);
  p.xi = lindblad::drive_for_photons_per_lifetime(p, c.cfg.photons_per_lifetime, tau_p);
  lindblad::G2Options opt;
  opt.cutoff = c.cfg.fock_cutoff;
  const auto g2 = lindblad::g2_transmitted(p, {0.0, 50.0 * tau_p}, opt);
  o.check("g2(0)", g2.g2[0], 1.0 + 1e-9, 1e300);
  near(o, "g2(50tau_P)", g2.g2[1], 1.0, 1e-3);

  const auto w = ensemble::gaussian_detuning_weights(c.cfg.vibration, c.cfg.vibration_points,
                                                     c.cfg.vibration_halfwidth_sigmas);
  lindblad::TriggerEmulation e;
  e.vibration = &w;
  const auto t = lindblad::triggered_g2_zero(p, e);
  o.check("triggered_g2(0)", t.g2_zero, 1.3, 1.8);
  // Frozen regression value of the converged model run.
  near(o, "triggered_regression", t.g2_zero, 1.7033, 0.002);

  auto zero = p;
  zero.g = 0.0;
  std::vector<double> tau;
  for (int i = 0; i <= 20; ++i) tau.push_back(i * 1e-9);
  double worst = 0.0;
  for (double v : lindblad::g2_transmitted(zero, tau, opt).g2) worst = std::max(worst, std::abs(v - 1.0));
  o.check("g0_control_dev", worst, 0.0, 1e-6);
}

// 11. Thermal population of the upper ground-state branch.
void thermal(const Context& c, Outcome& o) {
  o.check("p", lindblad::thermal_upper_branch_population(c.cfg.ground_splitting, c.cfg.temperature), 0.0, 0.0099999);
}

// 12. Closure of the synthetic pipeline over many replications.
void closure(const Context& c, Outcome& o) {
  const std::size_t reps = c.cfg.scan.replications;
  o.check("replications", static_cast<double>(reps), 100, 1e9);
  std::map<std::string, std::pair<int, int>> hits;  // within 1 sigma, within 2 sigma
  for (std::size_t r = 0; r < reps; ++r) {
    const auto run = pipeline::run_closure(c.cfg, 1, r);
    for (const auto& q : run.quantities) {
      auto& h = hits[q.name];
      h.first += q.within(1.0);
      h.second += q.within(2.0);
    }
  }
  for (const auto& [name, h] : hits) {
    const double cov1 = static_cast<double>(h.first) / reps, cov2 = static_cast<double>(h.second) / reps;
    o.check(name + ".within2", cov2, 0.90, 1.0);
    o.check(name + ".cov1", cov1, c.cfg.scan.coverage_low, c.cfg.scan.coverage_high);
  }
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[fs::relative(e.path(), dir).string()] = std::string(std::istreambuf_iterator<char>(in), {});
  }
  return files;
}

// 13. Every CLI command reproduces its output bytes under a fixed seed.
void determinism(const Context& c, Outcome& o) {
  if (c.cli.empty() || !fs::exists(c.cli)) {
    o.check("cli_available", false);
    return;
  }
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"cavity", "cavity --gap-points 3"},
      {"spectrum", "sim spectrum --probe-points 41 --detunings 0 2e9 --set vibration.points=21"},
      {"g2", "sim g2 --tau-points 21 --set vibration.points=21"},
      {"saturation", "sim saturation --photons 0.01 1 --set vibration.points=21"},
      {"fom", "fom"},
      {"synth", "synth --pl-map --transmission-scans 4"},
      {"pipeline", "pipeline"},
  };
  fs::remove_all(c.work / "determinism");
  for (const auto& [name, args] : commands) {
    std::map<std::string, std::string> runs[2];
    for (int k = 0; k < 2; ++k) {
      const auto out = c.work / "determinism" / (name + "_" + std::to_string(k));
      // The second run uses a different worker count.
      const std::string cmd = "\"" + c.cli.string() + "\" --seed 11 --workers " + (k ? "3" : "1") + " --out \"" +
                              out.string() + "\" " + args + " > \"" + out.string() + ".log\" 2>&1";
      fs::create_directories(out.parent_path());
      const int rc = std::system(cmd.c_str());
      o.check(name + "_exit0", rc == 0);
      runs[k] = snapshot(out);
    }
    o.check(name + "_identical", !runs[0].empty() && runs[0] == runs[1]);
  }
  // fit consumes synth output.
  std::string prev;
  for (int k = 0; k < 2; ++k) {
    const auto out = c.work / "determinism" / ("fit_" + std::to_string(k));
    const auto in = c.work / "determinism" / "synth_0" / "lifetime" / "purcell.csv";
    const std::string cmd = "\"" + c.cli.string() + "\" --out \"" + out.string() + "\" fit --model exp \"" +
                            in.string() + "\" > \"" + out.string() + ".log\" 2>&1";
    fs::create_directories(out);
    o.check("fit_exit0", std::system(cmd.c_str()) == 0);
    const auto s = snapshot(out);
    std::string all;
    for (const auto& [n, b] : s) all += n + b;
    if (k == 1) o.check("fit_identical", !all.empty() && all == prev);
    prev = all;
  }
}

const std::vector<std::pair<std::string, std::function<void(const Context&, Outcome&)>>> criteria = {
    {"Purcell factor", purcell},
    {"Gaussian-mode geometry", geometry},
    {"Dispersion slope and branch", dispersion},
    {"Vibration correction", vibration},
    {"Voigt composition", voigt},
    {"Cooperativities", cooperativities},
    {"Efficiency bound", efficiency},
    {"Weak-drive oracle", weak_drive},
    {"Transmission dip contrast", dip},
    {"Photon statistics", statistics},
    {"Thermal population", thermal},
    {"Pipeline closure", closure},
    {"CLI determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc)
      ctx.cli = argv[++i];
    else if (a == "--work" && i + 1 < argc)
      ctx.work = argv[++i];
    else
      selected.push_back(std::atoi(a.c_str()));
  }
  if (selected.empty())
    for (int n = 1; n <= static_cast<int>(criteria.size()); ++n) selected.push_back(n);

  std::cout.precision(6);
  bool all = true;
  for (int n : selected) {
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::cerr << "unknown criterion " << n << "\n";
      return 2;
    }
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[n - 1].second(ctx, o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %-28s %s |%s | %.1fs\n", n, criteria[n - 1].first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.str().c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
