#include "cqed/lindblad/system.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

namespace cqed::lindblad {

using constants::two_pi;

void SystemParams::validate() const {
  for (double v : {g, kappa, kappa_in, kappa_out, gamma, gamma_dp, xi})
    require(std::isfinite(v) && v >= 0.0, "system rates and drive must be finite and >= 0");
  require(std::isfinite(delta_e) && std::isfinite(delta_c), "detunings must be finite");
  require(kappa_in + kappa_out <= kappa * (1.0 + 1e-12), "kappa_in + kappa_out must not exceed kappa");
  require(weak_drive_threshold > 0.0, "weak-drive threshold must be > 0");
}

double SystemParams::drive_ratio() const { return kappa > 0.0 ? xi / (two_pi * kappa) : INFINITY; }

double SystemParams::input_flux() const {
  require(kappa_in > 0.0, "input flux needs kappa_in > 0");
  return xi * xi / (two_pi * kappa_in);
}

double SystemParams::cooperativity() const {
  const double gp = gamma + gamma_dp;
  require(kappa > 0.0 && gp > 0.0, "cooperativity needs kappa > 0 and gamma + gamma_dp > 0");
  return 4.0 * g * g / (kappa * gp);
}

double drive_for_input_flux(double flux, double kappa_in) {
  require(flux >= 0.0 && kappa_in > 0.0, "flux must be >= 0 and kappa_in > 0");
  return std::sqrt(flux * two_pi * kappa_in);
}

void HilbertConfig::validate() const {
  require(photon_cutoff >= 1, "photon cutoff must be >= 1");
  if (kind == Kind::two_excitation) require(photon_cutoff == 2, "two-excitation basis has photon cutoff 2");
}

int HilbertConfig::dimension() const {
  validate();
  return kind == Kind::two_excitation ? 5 : 2 * (photon_cutoff + 1);
}

std::vector<std::pair<int, int>> HilbertConfig::basis() const {
  validate();
  if (kind == Kind::two_excitation) return {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 0}};
  std::vector<std::pair<int, int>> b;
  for (int s = 0; s < 2; ++s)
    for (int n = 0; n <= photon_cutoff; ++n) b.emplace_back(n, s);
  return b;
}

Operators build_operators(const HilbertConfig& hilbert) {
  const auto basis = hilbert.basis();
  const int d = static_cast<int>(basis.size());
  Operators ops;
  ops.a = Matrix::Zero(d, d);
  ops.sigma = Matrix::Zero(d, d);
  ops.identity = Matrix::Identity(d, d);
  auto find = [&](int n, int s) {
    for (int i = 0; i < d; ++i)
      if (basis[i].first == n && basis[i].second == s) return i;
    return -1;
  };
  for (int j = 0; j < d; ++j) {
    const auto [n, s] = basis[j];
    if (n > 0) {
      const int i = find(n - 1, s);
      if (i >= 0) ops.a(i, j) = std::sqrt(static_cast<double>(n));
    }
    if (s == 1) {
      const int i = find(n, 0);
      if (i >= 0) ops.sigma(i, j) = 1.0;
    }
  }
  return ops;
}

Matrix build_hamiltonian(const SystemParams& p, const HilbertConfig& hilbert) {
  p.validate();
  const auto ops = build_operators(hilbert);
  const std::complex<double> i(0.0, 1.0);
  const Matrix ad = ops.a.adjoint();
  const Matrix sd = ops.sigma.adjoint();
  Matrix H = two_pi * p.delta_e * (sd * ops.sigma) + two_pi * p.delta_c * (ad * ops.a);
  H += i * p.xi * (ad - ops.a);
  // a sigma^dag taken as the adjoint of a^dag sigma: the product of truncated
  // operators loses <1e|a sigma^dag|2g> in the two-excitation basis.
  const Matrix exchange = ad * ops.sigma;
  H += i * (two_pi * p.g) * (exchange.adjoint() - exchange);
  return H;
}

Liouvillian build_liouvillian(const SystemParams& p, const HilbertConfig& hilbert) {
  const Matrix H = build_hamiltonian(p, hilbert);
  const auto ops = build_operators(hilbert);
  const int d = static_cast<int>(H.rows());
  const Matrix Id = Matrix::Identity(d, d);
  const std::complex<double> i(0.0, 1.0);
  Matrix L = -i * (Eigen::kroneckerProduct(Id, H).eval() - Eigen::kroneckerProduct(H.transpose(), Id).eval());
  const Matrix jumps[] = {std::sqrt(two_pi * p.gamma) * ops.sigma,
                          std::sqrt(two_pi * p.gamma_dp) * (ops.sigma.adjoint() * ops.sigma),
                          std::sqrt(two_pi * p.kappa) * ops.a};
  for (const auto& J : jumps) {
    if (J.cwiseAbs().maxCoeff() == 0.0) continue;
    const Matrix JdJ = J.adjoint() * J;
    L += Eigen::kroneckerProduct(J.conjugate(), J).eval();
    L -= 0.5 * Eigen::kroneckerProduct(Id, JdJ).eval();
    L -= 0.5 * Eigen::kroneckerProduct(JdJ.transpose(), Id).eval();
  }
  return {std::move(L), d, hilbert};
}

Vector vectorize(const Matrix& rho) { return Eigen::Map<const Vector>(rho.data(), rho.size()); }

Matrix unvectorize(const Vector& v, int dim) { return Eigen::Map<const Matrix>(v.data(), dim, dim); }

double thermal_upper_branch_population(double splitting_hz, double temperature_k) {
  require(temperature_k > 0.0, "temperature must be > 0");
  require(splitting_hz >= 0.0, "splitting must be >= 0");
  const double x = constants::h * splitting_hz / (constants::k_B * temperature_k);
  const double b = std::exp(-x);
  return b / (1.0 + b);
}

}  // namespace cqed::lindblad
