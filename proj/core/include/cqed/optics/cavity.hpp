#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqed/optics/stack.hpp"

namespace cqed::optics {

struct CavityGeometry {
  double air_gap = 6.50e-6;
  double diamond_thickness = 3.72e-6;
  double diamond_index = 2.41;
  double mirror_roc = 15.7e-6;
  MirrorSpec input_mirror;
  MirrorSpec output_mirror;
  double wavelength = 619e-9;

  void validate() const;
  double geometric_length() const { return air_gap + diamond_thickness / diamond_index; }
};

// Default HfO2/SiO2 recipe: 18 pairs (~80 ppm from air), 14 pairs (~2000 ppm from diamond).
DbrMirror default_input_dbr();
DbrMirror default_output_dbr();
CavityGeometry paper_geometry();

// Full stack from the fiber (input substrate) to the output substrate, together
// with the positions of the air and diamond elements inside it.
struct CavityLayout {
  LayerStack stack;
  std::size_t air_element = 0;
  std::size_t diamond_element = 0;  // equals air_element when t_d = 0
  bool has_diamond = true;
};

CavityLayout build_cavity(const CavityGeometry& geometry);

// arg(r_left r_right exp(2 i k t_air)) evaluated inside the air gap; zero on resonance.
double round_trip_phase(const CavityGeometry& geometry, double wavelength);

enum class Branch { air_like, diamond_like };
const char* to_string(Branch b);

struct ResonanceSearch {
  double grid_step = 1e-12;           // m, coarse transmission scan
  double min_transmission = 1e-4;     // ignore maxima below this
  double slope_gap_step = 1e-9;       // m, for the finite-difference slope
};

struct ModePoint {
  double gap = 0.0;          // m
  double wavelength = 0.0;   // m
  double frequency = 0.0;    // Hz
  double transmission = 0.0;
  double slope = 0.0;        // dnu/dgap, Hz/m
  Branch branch = Branch::air_like;
};

struct DispersionResult {
  std::vector<ModePoint> points;
  std::string diagnostic;  // non-empty when some gap had no resonance in the window
};

// Resonance wavelengths (transmission maxima) of the stack inside [lo, hi].
std::vector<std::pair<double, double>> find_resonances(const LayerStack& stack, double lo, double hi,
                                                       const ResonanceSearch& opt = {});

DispersionResult mode_dispersion(const CavityGeometry& geometry, const std::vector<double>& gaps,
                                 double lambda_min, double lambda_max,
                                 const ResonanceSearch& opt = {});

// Resonance closest to geometry.wavelength and its local slope.
ModePoint operating_point(const CavityGeometry& geometry, const ResonanceSearch& opt = {});

Branch classify_branch(const CavityGeometry& geometry, double slope, double frequency);

// Local mode spacing in frequency from the resonances adjacent to `wavelength`.
double free_spectral_range(const CavityGeometry& geometry, double wavelength, const ResonanceSearch& opt = {});

struct LayerSegment {
  double z_begin = 0.0;
  double z_end = 0.0;
  cplx index;
  cplx forward;   // amplitude of exp(+ikz) at z_begin
  cplx backward;  // amplitude of exp(-ikz) at z_begin
  std::size_t element = 0;
};

struct FieldProfile {
  std::vector<double> z;          // cell centers, strictly increasing
  std::vector<double> intensity;  // |E|^2 normalized to its maximum
  std::vector<double> index;      // real part of n(z)
  std::vector<LayerSegment> segments;
  double wavelength = 0.0;
  double norm = 1.0;              // raw |E|^2 that maps to intensity 1
  std::size_t emitter_segment = 0;
  std::vector<double> air_antinodes;
  std::vector<double> emitter_antinodes;
  double emitter_antinode_distance = 0.0;  // first emitter-medium antinode from the far mirror
  int mode_number = 0;                     // antinodes between the mirror surfaces
  bool off_resonance = false;

  // Field intensity on the same normalization at an arbitrary z inside the stack.
  double intensity_at(double z) const;
};

// Samples |E|^2 inside every finite element of the stack for unit incident amplitude.
// `emitter_element` selects the medium used for normalization and antinode tagging.
FieldProfile field_profile(const LayerStack& stack, double wavelength, std::size_t emitter_element,
                           double max_step = 0.5e-9);
FieldProfile field_profile(const CavityGeometry& geometry, double wavelength, double max_step = 0.5e-9);

// 2 * int n^2 |E|^2 dz / (n_e^2 max_emitter |E|^2).
double effective_length(const FieldProfile& profile);

double beam_waist(const CavityGeometry& geometry);

struct ModeVolume {
  double cubic_meters = 0.0;
  double cubic_wavelengths = 0.0;
};
ModeVolume mode_volume(double waist, double effective_length, double wavelength);

double purcell_factor(double wavelength, double index, double q_factor, double volume_lambda3);

struct LossBudget {
  double total_loss_ppm = 0.0;
  double finesse = 0.0;
  double excess_loss_ppm = 0.0;
  bool inconsistent = false;  // excess < 0
};
LossBudget loss_budget(double kappa, double fsr, double t_in_ppm, double t_out_ppm);

double finesse_from_loss(double total_loss_ppm);

// Lorentzian T_max / (1 + (2 dc / kappa)^2) with T_max = 4 T_in T_out / total^2.
double empty_cavity_transmission(double t_in_ppm, double t_out_ppm, double total_loss_ppm,
                                 double delta_c, double kappa);

struct CavityDerived {
  double resonance_wavelength = 0.0;
  double frequency = 0.0;
  double effective_length = 0.0;
  double waist = 0.0;
  double mode_volume_lambda3 = 0.0;
  double q_factor = 0.0;
  double kappa = 0.0;
  double finesse = 0.0;
  double total_loss_ppm = 0.0;
  double purcell = 0.0;
  double dispersion_slope = 0.0;  // Hz/m
  int mode_number = 0;
  double emitter_antinode_distance = 0.0;
  double input_transmittance_ppm = 0.0;
  double output_transmittance_ppm = 0.0;
  double empty_transmission = 0.0;
  Branch branch = Branch::air_like;
};

CavityDerived characterize(const CavityGeometry& geometry, double kappa, double total_loss_ppm);

}  // namespace cqed::optics
