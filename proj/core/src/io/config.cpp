#include "cqed/io/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

namespace cqed::io {

namespace {

json mirror(int pairs, double ppm) {
  return {{"model", "dbr"},        {"high_index", 1.95},       {"low_index", 1.46},
          {"pairs", pairs},        {"design_wavelength_m", 619e-9}, {"substrate_index", 1.45},
          {"transmittance_ppm", ppm}, {"loss_ppm", 0.0}};
}

json histogram(double amplitude, double fast_amplitude, double background) {
  return {{"bins", 200},           {"bin_width_s", 0.25e-9},     {"excitation_time_s", 2e-9},
          {"amplitude", amplitude}, {"fast_amplitude", fast_amplitude}, {"fast_decay_s", 0.3e-9},
          {"background", background}, {"poisson", true}};
}

json grid(double start, double stop, int points) {
  return {{"start_hz", start}, {"stop_hz", stop}, {"points", points}};
}

json noise(double peak, double background, double integration) {
  return {{"peak_rate", peak}, {"background_rate", background}, {"integration_time_s", integration}, {"poisson", true}};
}

bool compatible(const json& schema, const json& value) {
  if (schema.is_number_float()) return value.is_number();
  if (schema.is_number_integer()) return value.is_number_integer();
  if (schema.is_boolean()) return value.is_boolean();
  if (schema.is_string()) return value.is_string();
  if (schema.is_object()) return value.is_object();
  if (schema.is_array()) return value.is_array();
  return false;
}

const char* type_name(const json& j) { return j.type_name(); }

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

Measured measured(const json& j, const char* value, const char* sigma) {
  return {get<double>(j, value), get<double>(j, sigma)};
}

optics::MirrorSpec parse_mirror(const json& m, const std::string& where) {
  const auto model = get<std::string>(m, "model");
  if (model == "lumped") return optics::LumpedMirror{get<double>(m, "transmittance_ppm"), get<double>(m, "loss_ppm")};
  if (model == "dbr")
    return optics::quarter_wave_dbr(get<double>(m, "high_index"), get<double>(m, "low_index"), get<int>(m, "pairs"),
                                    get<double>(m, "design_wavelength_m"), get<double>(m, "substrate_index"));
  throw ConfigError(where + ".model must be 'dbr' or 'lumped', got '" + model + "'");
}

synth::HistogramSpec parse_histogram(const json& h) {
  synth::HistogramSpec s;
  s.bins = get<int>(h, "bins");
  s.bin_width = get<double>(h, "bin_width_s");
  s.excitation_time = get<double>(h, "excitation_time_s");
  s.amplitude = get<double>(h, "amplitude");
  s.fast_amplitude = get<double>(h, "fast_amplitude");
  s.fast_decay = get<double>(h, "fast_decay_s");
  s.background = get<double>(h, "background");
  s.poisson = get<bool>(h, "poisson");
  return s;
}

synth::ScanGrid parse_grid(const json& g) {
  return {get<double>(g, "start_hz"), get<double>(g, "stop_hz"), get<int>(g, "points")};
}

synth::NoiseSpec parse_noise(const json& n) {
  synth::NoiseSpec s;
  s.peak_rate = get<double>(n, "peak_rate");
  s.background_rate = get<double>(n, "background_rate");
  s.integration_time = get<double>(n, "integration_time_s");
  s.poisson = get<bool>(n, "poisson");
  return s;
}

Truths parse_truths(const json& t) {
  Truths r;
  r.natural_lifetime = get<double>(t, "natural_lifetime_s");
  r.purcell_lifetime = get<double>(t, "purcell_lifetime_s");
  r.linewidth = get<double>(t, "linewidth_hz");
  r.purcell_linewidth = get<double>(t, "purcell_linewidth_hz");
  r.cavity_linewidth = get<double>(t, "cavity_linewidth_hz");
  return r;
}

}  // namespace

json default_config() {
  const double tau = 5.0e-9;
  return {
      {"geometry",
       {{"air_gap_m", 6.50e-6},
        {"diamond_thickness_m", 3.72e-6},
        {"diamond_index", 2.41},
        {"mirror_roc_m", 15.7e-6},
        {"wavelength_m", 619e-9}}},
      {"mirrors",
       {{"input", mirror(18, 80.0)},
        {"output", mirror(14, 2000.0)},
        {"total_loss_ppm", 7500.0},
        {"kappa_hz", 6.86e9}}},
      {"system",
       {{"g_hz", 0.30e9},
        {"natural_lifetime_s", tau},
        {"linewidth_hz", 77.6e6},
        {"delta_e_hz", 0.0},
        {"delta_c_hz", 0.0},
        {"photons_per_lifetime", 0.0015},
        {"weak_drive_threshold", 0.1},
        {"fock_cutoff", 8},
        {"ground_splitting_hz", 850e9},
        {"temperature_k", 8.0}}},
      {"vibration",
       {{"sigma_length_m", 27e-12}, {"dispersion_slope_hz_per_m", 46e6 / 1e-12}, {"points", 201},
        {"halfwidth_sigmas", 5.0}}},
      {"fom",
       {{"natural_lifetime_s", tau},
        {"natural_lifetime_sigma_s", 0.1e-9},
        {"purcell_lifetime_s", 2.55e-9},
        {"purcell_lifetime_sigma_s", 0.01e-9},
        {"linewidth_hz", 77.6e6},
        {"linewidth_sigma_hz", 0.8e6},
        {"purcell_linewidth_hz", 126e6},
        {"purcell_linewidth_sigma_hz", 4e6},
        {"overlap_correction", 0.90},
        {"purcell_factor", 6.9},
        {"beta0", 0.57},
        {"beta0_sigma", 0.01},
        {"zeta", ensemble::zeta_100},
        {"eps_max", 1.0},
        {"g_denominator", "natural"}}},
      {"emitter_truth",
       {{"center_hz", 558.5e9},
        {"diffusion_sigma_hz", 50e6},
        {"ionization_prob", 0.02},
        {"repump_success_prob", 0.9},
        {"conditional_repump", true},
        {"natural_lifetime_s", tau},
        {"purcell_lifetime_s", 2.55e-9},
        {"linewidth_hz", 77.6e6},
        {"purcell_linewidth_hz", 126e6},
        {"cavity_linewidth_hz", 6.86e9}}},
      {"scan",
       {{"replications", 200},
        {"purcell_histogram", histogram(4000.0, 4000.0, 2.0)},
        {"natural_histogram", histogram(2000.0, 0.0, 2.0)},
        {"lifetime_fast_fraction", 0.01},
        {"ple_grid", grid(558.0e9, 559.0e9, 201)},
        {"ple_on_scans", 170},
        {"ple_off_scans", 307},
        {"ple_on_psb", noise(400.0, 20.0, 50e-3)},
        {"ple_on_zpl", noise(20000.0, 200.0, 50e-3)},
        {"ple_off_psb", noise(400.0, 20.0, 50e-3)},
        {"off_resonance_detuning_hz", 150e9},
        {"cavity_grid", grid(-30e9, 30e9, 301)},
        {"cavity_noise", noise(2e5, 100.0, 50e-3)},
        {"closure_sigma", 3.0},
        {"coverage_low", 0.60},
        {"coverage_high", 0.75},
        {"truth_perturbation",
         {{"natural_lifetime_s", 0.0},
          {"purcell_lifetime_s", 0.0},
          {"linewidth_hz", 0.0},
          {"purcell_linewidth_hz", 0.0},
          {"cavity_linewidth_hz", 0.0}}}}},
      {"output", {{"directory", "out"}, {"plot_scripts", false}}},
  };
}

void merge_config(json& base, const json& user, const std::string& where) {
  if (!user.is_object()) throw ConfigError((where.empty() ? std::string("config") : where) + " must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key '" + path + "'");
    json& slot = base[it.key()];
    if (!compatible(slot, it.value()))
      throw ConfigError("config key '" + path + "' expects " + type_name(slot) + ", got " + type_name(it.value()));
    if (slot.is_object())
      merge_config(slot, it.value(), path);
    else
      slot = it.value();
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json patch = value;
  std::string rest = key;
  std::vector<std::string> parts;
  for (std::size_t pos; (pos = rest.find('.')) != std::string::npos; rest = rest.substr(pos + 1))
    parts.push_back(rest.substr(0, pos));
  parts.push_back(rest);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (it->empty()) throw ConfigError("override key '" + key + "' has an empty component");
    patch = json{{*it, patch}};
  }
  merge_config(doc, patch);
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

std::filesystem::path resolve_config_path(const std::string& name) {
  std::filesystem::path p(name);
  if (std::filesystem::exists(p)) return p;
  if (const char* dir = std::getenv("CQED_CONFIG_DIR"); dir && p.is_relative()) {
    for (auto candidate : {std::filesystem::path(dir) / p, std::filesystem::path(dir) / (name + ".json")})
      if (std::filesystem::exists(candidate)) return candidate;
  }
  throw ConfigError("config file '" + name + "' not found");
}

json load_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides) {
  json doc = default_config();
  if (path) merge_config(doc, read_json(*path));
  for (const auto& o : overrides) apply_override(doc, o);
  parse_config(doc);  // validates
  return doc;
}

RunConfig parse_config(const json& doc) {
  RunConfig c;
  c.document = doc;
  try {
    const auto& g = doc.at("geometry");
    c.geometry.air_gap = get<double>(g, "air_gap_m");
    c.geometry.diamond_thickness = get<double>(g, "diamond_thickness_m");
    c.geometry.diamond_index = get<double>(g, "diamond_index");
    c.geometry.mirror_roc = get<double>(g, "mirror_roc_m");
    c.geometry.wavelength = get<double>(g, "wavelength_m");

    const auto& m = doc.at("mirrors");
    c.geometry.input_mirror = parse_mirror(m.at("input"), "mirrors.input");
    c.geometry.output_mirror = parse_mirror(m.at("output"), "mirrors.output");
    c.input_ppm = get<double>(m.at("input"), "transmittance_ppm");
    c.output_ppm = get<double>(m.at("output"), "transmittance_ppm");
    c.total_loss_ppm = get<double>(m, "total_loss_ppm");
    c.kappa = get<double>(m, "kappa_hz");
    c.geometry.validate();
    require(c.total_loss_ppm > 0.0 && c.input_ppm >= 0.0 && c.output_ppm >= 0.0 &&
                c.input_ppm + c.output_ppm <= c.total_loss_ppm,
            "mirror transmittances must be >= 0 and not exceed the total loss");
    require(c.kappa > 0.0, "kappa must be > 0");

    const auto& s = doc.at("system");
    c.natural_lifetime = get<double>(s, "natural_lifetime_s");
    require(c.natural_lifetime > 0.0, "natural lifetime must be > 0");
    c.system.g = get<double>(s, "g_hz");
    c.system.kappa = c.kappa;
    c.system.kappa_in = c.kappa * c.input_ppm / c.total_loss_ppm;
    c.system.kappa_out = c.kappa * c.output_ppm / c.total_loss_ppm;
    c.system.gamma = 1.0 / (constants::two_pi * c.natural_lifetime);
    const double linewidth = get<double>(s, "linewidth_hz");
    require(linewidth >= c.system.gamma, "system.linewidth_hz must be >= 1/(2 pi natural lifetime)");
    c.system.gamma_dp = linewidth - c.system.gamma;
    c.system.delta_e = get<double>(s, "delta_e_hz");
    c.system.delta_c = get<double>(s, "delta_c_hz");
    c.system.weak_drive_threshold = get<double>(s, "weak_drive_threshold");
    c.photons_per_lifetime = get<double>(s, "photons_per_lifetime");
    require(c.photons_per_lifetime > 0.0, "photons_per_lifetime must be > 0");
    c.fock_cutoff = get<int>(s, "fock_cutoff");
    require(c.fock_cutoff >= 1, "fock_cutoff must be >= 1");
    c.ground_splitting = get<double>(s, "ground_splitting_hz");
    c.temperature = get<double>(s, "temperature_k");
    c.system.validate();

    const auto& v = doc.at("vibration");
    c.vibration.sigma_length = get<double>(v, "sigma_length_m");
    c.vibration.dispersion_slope = get<double>(v, "dispersion_slope_hz_per_m");
    c.vibration_points = get<int>(v, "points");
    c.vibration_halfwidth_sigmas = get<double>(v, "halfwidth_sigmas");
    c.vibration.validate();
    require(c.vibration_points >= 3 && c.vibration_points % 2 == 1, "vibration.points must be odd and >= 3");
    require(c.vibration_halfwidth_sigmas >= 4.0, "vibration.halfwidth_sigmas must be >= 4");

    const auto& f = doc.at("fom");
    c.fom.natural_lifetime = measured(f, "natural_lifetime_s", "natural_lifetime_sigma_s");
    c.fom.purcell_lifetime = measured(f, "purcell_lifetime_s", "purcell_lifetime_sigma_s");
    c.fom.linewidth = measured(f, "linewidth_hz", "linewidth_sigma_hz");
    c.fom.purcell_linewidth = measured(f, "purcell_linewidth_hz", "purcell_linewidth_sigma_hz");
    c.fom.overlap_correction = get<double>(f, "overlap_correction");
    c.fom.purcell_factor = get<double>(f, "purcell_factor");
    c.fom.beta0 = measured(f, "beta0", "beta0_sigma");
    c.fom.zeta = get<double>(f, "zeta");
    c.fom.eps_max = get<double>(f, "eps_max");
    c.fom.g_denominator = get<std::string>(f, "g_denominator");
    require(c.fom.g_denominator == "natural" || c.fom.g_denominator == "broadened",
            "fom.g_denominator must be 'natural' or 'broadened'");
    require(c.fom.overlap_correction > 0.0 && c.fom.overlap_correction <= 1.0,
            "fom.overlap_correction must lie in (0, 1]");

    const auto& e = doc.at("emitter_truth");
    c.emitter.center = get<double>(e, "center_hz");
    c.emitter.diffusion_sigma = get<double>(e, "diffusion_sigma_hz");
    c.emitter.ionization_prob = get<double>(e, "ionization_prob");
    c.emitter.repump_success_prob = get<double>(e, "repump_success_prob");
    c.emitter.conditional_repump = get<bool>(e, "conditional_repump");
    c.truth = parse_truths(e);
    c.emitter.linewidth = c.truth.linewidth;
    c.emitter.validate();
    require(c.truth.purcell_lifetime > 0.0 && c.truth.purcell_lifetime <= c.truth.natural_lifetime,
            "emitter_truth lifetimes must satisfy 0 < purcell <= natural");
    require(c.truth.purcell_linewidth >= c.truth.linewidth && c.truth.cavity_linewidth > 0.0,
            "emitter_truth linewidths must satisfy purcell >= broadened and cavity > 0");

    const auto& sc = doc.at("scan");
    c.scan.replications = get<std::size_t>(sc, "replications");
    c.scan.purcell_histogram = parse_histogram(sc.at("purcell_histogram"));
    c.scan.natural_histogram = parse_histogram(sc.at("natural_histogram"));
    c.scan.fast_fraction = get<double>(sc, "lifetime_fast_fraction");
    require(c.scan.fast_fraction > 0.0 && c.scan.fast_fraction < 1.0, "scan.lifetime_fast_fraction must lie in (0, 1)");
    c.scan.ple_on_scans = get<std::size_t>(sc, "ple_on_scans");
    c.scan.ple_off_scans = get<std::size_t>(sc, "ple_off_scans");
    const auto ple_grid = parse_grid(sc.at("ple_grid"));
    c.scan.ple_on.grid = ple_grid;
    c.scan.ple_on.on_resonance = true;
    c.scan.ple_on.psb = parse_noise(sc.at("ple_on_psb"));
    c.scan.ple_on.zpl = parse_noise(sc.at("ple_on_zpl"));
    c.scan.ple_off.grid = ple_grid;
    c.scan.ple_off.on_resonance = false;
    c.scan.ple_off.psb = parse_noise(sc.at("ple_off_psb"));
    c.scan.ple_off.off_resonance_detuning = get<double>(sc, "off_resonance_detuning_hz");
    c.scan.cavity_scan.grid = parse_grid(sc.at("cavity_grid"));
    c.scan.cavity_scan.noise = parse_noise(sc.at("cavity_noise"));
    c.scan.closure_sigma = get<double>(sc, "closure_sigma");
    c.scan.coverage_low = get<double>(sc, "coverage_low");
    c.scan.coverage_high = get<double>(sc, "coverage_high");
    c.scan.perturbation = parse_truths(sc.at("truth_perturbation"));
    require(c.scan.closure_sigma > 0.0, "scan.closure_sigma must be > 0");
    require(c.scan.replications >= 1, "scan.replications must be >= 1");

    const auto& o = doc.at("output");
    c.output_directory = get<std::string>(o, "directory");
    c.plot_scripts = get<bool>(o, "plot_scripts");
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
  return c;
}

}  // namespace cqed::io
