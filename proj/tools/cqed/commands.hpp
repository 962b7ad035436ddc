#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cqed/io/config.hpp"

namespace cqed::cli {

enum ExitCode : int { ok = 0, failure = 1, config_error = 2, numeric_error = 3, closure_error = 4 };

struct Context {
  io::RunConfig config;
  std::filesystem::path out;
  std::uint64_t seed = 1;
};

struct CavityArgs {
  double gap_min = 6.0e-6;
  double gap_max = 7.0e-6;
  int gap_points = 21;
  double lambda_min = 610e-9;
  double lambda_max = 630e-9;
};

struct SimArgs {
  std::string kind;                       // spectrum | g2 | saturation
  std::vector<double> emitter_cavity_detunings{0, 1e9, 2e9, 3e9, 4e9, 5e9, 6e9, 7e9};
  double probe_span = 20e9;
  int probe_points = 401;
  bool vibration = true;
  double tau_max = 20e-9;
  int tau_points = 201;
  std::vector<double> photons_per_lifetime{1e-3, 1e-2, 0.03, 0.1, 0.3, 1.0, 3.0};
};

struct FitArgs {
  std::string model = "lorentzian-dip";  // lorentzian-peak | lorentzian-dip | voigt | exp | contrast
  std::vector<std::string> files;
  double gaussian_fwhm = -1.0;            // negative: from the vibration spec
  std::optional<double> window_start;
  double fast_fraction = 0.05;
  std::string weighting = "poisson";
};

struct SynthArgs {
  bool pl_map = false;
  std::size_t transmission_scans = 20;
};

int cmd_cavity(const Context& ctx, const CavityArgs& a);
int cmd_sim(const Context& ctx, const SimArgs& a);
int cmd_fom(const Context& ctx);
int cmd_fit(const Context& ctx, const FitArgs& a);
int cmd_synth(const Context& ctx, const SynthArgs& a);
int cmd_pipeline(const Context& ctx);

}  // namespace cqed::cli
