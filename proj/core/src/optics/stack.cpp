#include "cqed/optics/stack.hpp"

#include <cmath>
#include <string>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

namespace cqed::optics {

namespace {

const cplx I{0.0, 1.0};

void validate_lumped(const LumpedMirror& m) {
  require(m.transmittance_ppm > 0.0, "lumped mirror transmittance must be > 0 ppm");
  require(m.loss_ppm >= 0.0, "lumped mirror loss must be >= 0 ppm");
  require(m.transmittance_ppm + m.loss_ppm <= 1e6, "lumped mirror transmittance + loss exceeds 1e6 ppm");
}

void validate_layer(const Layer& l) {
  require(std::isfinite(l.thickness) && l.thickness >= 0.0, "layer thickness must be >= 0");
  require(l.index > 0.0, "layer index must be > 0");
  require(l.absorption >= 0.0, "layer absorption must be >= 0");
}

}  // namespace

void LayerStack::validate() const {
  require(ambient_index > 0.0 && substrate_index > 0.0, "half-space indices must be > 0");
  for (const auto& e : elements) {
    if (const auto* l = std::get_if<Layer>(&e))
      validate_layer(*l);
    else
      validate_lumped(std::get<LumpedMirror>(e));
  }
}

Eigen::Matrix2cd interface_matrix(cplx n1, cplx n2) {
  const cplx r = (n1 - n2) / (n1 + n2);
  const cplx t = 2.0 * n1 / (n1 + n2);
  Eigen::Matrix2cd m;
  m << 1.0, r, r, 1.0;
  return m / t;
}

Eigen::Matrix2cd propagation_matrix(cplx n, double thickness, double wavelength) {
  const cplx phi = constants::two_pi * n * thickness / wavelength;
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = std::exp(-I * phi);
  m(1, 1) = std::exp(I * phi);
  return m;
}

Eigen::Matrix2cd lumped_mirror_matrix(const LumpedMirror& mirror) {
  const double T = mirror.transmittance_ppm * constants::ppm;
  const double R = 1.0 - T - mirror.loss_ppm * constants::ppm;
  const double r = -std::sqrt(std::max(R, 0.0));
  const double t = std::sqrt(T);
  Eigen::Matrix2cd m;
  m << 1.0 / t, -r / t, r / t, (t * t - r * r) / t;
  return m;
}

Eigen::Matrix2cd characteristic_matrix(const LayerStack& stack, double wavelength) {
  require(wavelength > 0.0, "wavelength must be > 0");
  stack.validate();
  Eigen::Matrix2cd M = Eigen::Matrix2cd::Identity();
  cplx medium = stack.ambient_index;
  for (const auto& e : stack.elements) {
    if (const auto* l = std::get_if<Layer>(&e)) {
      const cplx n = l->complex_index();
      if (n != medium) M = M * interface_matrix(medium, n);
      M = M * propagation_matrix(n, l->thickness, wavelength);
      medium = n;
    } else {
      M = M * lumped_mirror_matrix(std::get<LumpedMirror>(e));
    }
  }
  const cplx ns = stack.substrate_index;
  if (ns != medium) M = M * interface_matrix(medium, ns);
  return M;
}

TransferResult transfer_matrix(const LayerStack& stack, double wavelength) {
  const Eigen::Matrix2cd M = characteristic_matrix(stack, wavelength);
  TransferResult out;
  out.t = 1.0 / M(0, 0);
  out.r = M(1, 0) / M(0, 0);
  out.R = std::norm(out.r);
  out.T = stack.substrate_index / stack.ambient_index * std::norm(out.t);
  return out;
}

DbrMirror quarter_wave_dbr(double n_high, double n_low, int pairs, double design_wavelength,
                           double substrate_index) {
  require(n_high > 0.0 && n_low > 0.0 && pairs >= 0 && design_wavelength > 0.0,
          "invalid quarter-wave DBR parameters");
  DbrMirror m;
  m.substrate_index = substrate_index;
  for (int i = 0; i < pairs; ++i) {
    m.layers.push_back({design_wavelength / (4.0 * n_high), n_high, 0.0});
    m.layers.push_back({design_wavelength / (4.0 * n_low), n_low, 0.0});
  }
  return m;
}

void validate_mirror(const MirrorSpec& m) {
  if (const auto* l = std::get_if<LumpedMirror>(&m)) {
    validate_lumped(*l);
    return;
  }
  const auto& dbr = std::get<DbrMirror>(m);
  require(dbr.substrate_index > 0.0, "DBR substrate index must be > 0");
  for (const auto& l : dbr.layers) validate_layer(l);
}

double mirror_transmittance_ppm(const MirrorSpec& m, double n_incident, double wavelength) {
  validate_mirror(m);
  if (const auto* l = std::get_if<LumpedMirror>(&m)) return l->transmittance_ppm;
  const auto& dbr = std::get<DbrMirror>(m);
  LayerStack s{n_incident, {}, dbr.substrate_index};
  for (const auto& l : dbr.layers) s.elements.emplace_back(l);
  return transfer_matrix(s, wavelength).T / constants::ppm;
}

}  // namespace cqed::optics
