#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cqed::lindblad {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Rates and detunings in Hz (ordinary frequency). xi is the drive amplitude in s^-1,
// input photon flux xi^2 / (2 pi kappa_in).
struct SystemParams {
  double g = 0.30e9;
  double kappa = 6.86e9;
  double kappa_in = 6.86e9 * 80.0 / 7500.0;
  double kappa_out = 6.86e9 * 2000.0 / 7500.0;
  double gamma = 31.830988618379067e6;   // 1 / (2 pi 5 ns)
  double gamma_dp = 77.6e6 - 31.830988618379067e6;
  double delta_e = 0.0;  // nu_e - nu_probe
  double delta_c = 0.0;  // nu_c - nu_probe
  double xi = 1e3;
  double weak_drive_threshold = 0.1;  // xi / (2 pi kappa)

  void validate() const;
  double drive_ratio() const;
  bool weak_drive() const { return drive_ratio() < weak_drive_threshold; }
  double input_flux() const;
  double cooperativity() const;  // 4 g^2 / (kappa (gamma + gamma_dp))
};

double drive_for_input_flux(double flux, double kappa_in);

struct HilbertConfig {
  enum class Kind { two_excitation, fock };
  Kind kind = Kind::fock;
  int photon_cutoff = 2;

  static HilbertConfig two_excitation() { return {Kind::two_excitation, 2}; }
  static HilbertConfig fock(int n) { return {Kind::fock, n}; }

  void validate() const;
  int dimension() const;
  // (photon number, emitter excited) for every basis index.
  std::vector<std::pair<int, int>> basis() const;
};

struct Operators {
  Matrix a;      // photon annihilation
  Matrix sigma;  // |g><e|
  Matrix identity;
};

Operators build_operators(const HilbertConfig& hilbert);

Matrix build_hamiltonian(const SystemParams& p, const HilbertConfig& hilbert);

// Column-stacking vectorization: vec(A X B) = (B^T kron A) vec(X).
struct Liouvillian {
  Matrix matrix;
  int dim = 0;  // Hilbert dimension
  HilbertConfig hilbert;
};

Liouvillian build_liouvillian(const SystemParams& p, const HilbertConfig& hilbert);

Vector vectorize(const Matrix& rho);
Matrix unvectorize(const Vector& v, int dim);

// Maxwell-Boltzmann population of the upper ground-state branch.
double thermal_upper_branch_population(double splitting_hz, double temperature_k);

}  // namespace cqed::lindblad
