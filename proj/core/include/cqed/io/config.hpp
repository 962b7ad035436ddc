#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cqed/ensemble/cooperativity.hpp"
#include "cqed/ensemble/vibration.hpp"
#include "cqed/measured.hpp"
#include "cqed/lindblad/system.hpp"
#include "cqed/optics/cavity.hpp"
#include "cqed/synth/generators.hpp"

namespace cqed::io {

using json = nlohmann::json;

// Every key with its default value. Also serves as the schema: user documents may only
// contain keys present here, with the same JSON type (integers are accepted for floats).
json default_config();

// Deep merge of `user` into `base`; unknown keys and type mismatches throw ConfigError.
void merge_config(json& base, const json& user, const std::string& where = "");

// "section.key=value"; the value is parsed as JSON and taken as a string otherwise.
void apply_override(json& doc, const std::string& assignment);

json read_json(const std::filesystem::path& path);

// defaults <- file <- overrides.
json load_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides = {});

// Resolves a bare config name against $CQED_CONFIG_DIR when the path does not exist as given.
std::filesystem::path resolve_config_path(const std::string& name);

struct FomInputs {
  Measured natural_lifetime{5.0e-9, 0.1e-9};
  Measured purcell_lifetime{2.55e-9, 0.01e-9};
  Measured linewidth{77.6e6, 0.8e6};          // gamma'
  Measured purcell_linewidth{126e6, 4e6};     // gamma'_P
  double overlap_correction = 0.90;
  double purcell_factor = 6.9;
  Measured beta0{0.57, 0.01};
  double zeta = ensemble::zeta_100;
  double eps_max = 1.0;
  std::string g_denominator = "natural";      // natural | broadened
};

struct Truths {
  double natural_lifetime = 5.0e-9;
  double purcell_lifetime = 2.55e-9;
  double linewidth = 77.6e6;
  double purcell_linewidth = 126e6;
  double cavity_linewidth = 6.86e9;
};

struct ClosureScenario {
  std::size_t replications = 100;
  synth::HistogramSpec purcell_histogram;
  synth::HistogramSpec natural_histogram;
  double fast_fraction = 0.01;  // automatic lifetime window start
  std::size_t ple_on_scans = 170;
  std::size_t ple_off_scans = 307;
  synth::PleScanSpec ple_on;
  synth::PleScanSpec ple_off;
  synth::TransmissionScanSpec cavity_scan;  // empty-cavity sweep fitted with the fixed-Gaussian Voigt
  double closure_sigma = 3.0;
  double coverage_low = 0.60;
  double coverage_high = 0.75;
  Truths perturbation;  // relative offsets of the generating truths
};

struct RunConfig {
  optics::CavityGeometry geometry;
  double input_ppm = 80.0;
  double output_ppm = 2000.0;
  double total_loss_ppm = 7500.0;
  double kappa = 6.86e9;

  lindblad::SystemParams system;
  double natural_lifetime = 5.0e-9;
  double photons_per_lifetime = 0.0015;
  int fock_cutoff = 8;
  double ground_splitting = 850e9;
  double temperature = 8.0;

  ensemble::VibrationSpec vibration;
  int vibration_points = 201;
  double vibration_halfwidth_sigmas = 5.0;

  FomInputs fom;
  synth::EmitterTruth emitter;
  Truths truth;
  ClosureScenario scan;

  std::string output_directory = "out";
  bool plot_scripts = false;

  json document;
};

RunConfig parse_config(const json& doc);

}  // namespace cqed::io
