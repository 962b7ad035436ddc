#pragma once

#include <complex>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace cqed::optics {

using cplx = std::complex<double>;

// Homogeneous slab. `absorption` is the imaginary part of the index (k >= 0).
struct Layer {
  double thickness = 0.0;  // m
  double index = 1.0;
  double absorption = 0.0;

  cplx complex_index() const { return {index, absorption}; }
};

// Zero-thickness mirror embedded in a single medium, r = -sqrt(R), t = sqrt(T).
struct LumpedMirror {
  double transmittance_ppm = 0.0;
  double loss_ppm = 0.0;
};

using StackElement = std::variant<Layer, LumpedMirror>;

// Light enters from the ambient half-space, elements are listed in propagation
// order, and leaves into the substrate half-space.
struct LayerStack {
  double ambient_index = 1.0;
  std::vector<StackElement> elements;
  double substrate_index = 1.0;

  void validate() const;
};

struct TransferResult {
  cplx r;
  cplx t;
  double R = 0.0;
  double T = 0.0;  // power transmittance including the n_sub/n_amb flux factor
};

// Forward/backward amplitude matrices. [A_left; B_left] = M [A_right; B_right].
Eigen::Matrix2cd interface_matrix(cplx n1, cplx n2);
Eigen::Matrix2cd propagation_matrix(cplx n, double thickness, double wavelength);
Eigen::Matrix2cd lumped_mirror_matrix(const LumpedMirror& m);

Eigen::Matrix2cd characteristic_matrix(const LayerStack& stack, double wavelength);
TransferResult transfer_matrix(const LayerStack& stack, double wavelength);

// Quarter-wave Bragg mirror. Layers are ordered from the cavity side outward,
// starting with the high-index layer.
struct DbrMirror {
  std::vector<Layer> layers;
  double substrate_index = 1.45;
};

DbrMirror quarter_wave_dbr(double n_high, double n_low, int pairs, double design_wavelength,
                           double substrate_index);

using MirrorSpec = std::variant<LumpedMirror, DbrMirror>;

void validate_mirror(const MirrorSpec& m);

// Power transmittance (ppm) of the mirror seen from a medium of index n_incident.
double mirror_transmittance_ppm(const MirrorSpec& m, double n_incident, double wavelength);

}  // namespace cqed::optics
