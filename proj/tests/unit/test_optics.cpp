#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"
#include "cqed/optics/cavity.hpp"
#include "cqed/optics/stack.hpp"

using namespace cqed;
using namespace cqed::optics;

namespace {

constexpr double lambda0 = 619e-9;

// Integrates E'' = -k^2 n(z)^2 E backwards from the substrate with RK4 and
// matches the ambient solution A e^{ikz} + B e^{-ikz} at z = 0.
TransferResult helmholtz_rk(const LayerStack& s, double wavelength, int steps_per_layer = 4000) {
  using c = std::complex<double>;
  const double k = constants::two_pi / wavelength;
  const c I(0.0, 1.0);
  double total = 0.0;
  for (const auto& e : s.elements) total += std::get<Layer>(e).thickness;
  c E = 1.0, dE = I * k * s.substrate_index;
  double z = total;
  for (auto it = s.elements.rbegin(); it != s.elements.rend(); ++it) {
    const auto& l = std::get<Layer>(*it);
    const c n = l.complex_index();
    const double h = -l.thickness / steps_per_layer;
    auto f = [&](c e, c de) { return std::pair<c, c>{de, -k * k * n * n * e}; };
    for (int i = 0; i < steps_per_layer; ++i) {
      auto [a1, b1] = f(E, dE);
      auto [a2, b2] = f(E + 0.5 * h * a1, dE + 0.5 * h * b1);
      auto [a3, b3] = f(E + 0.5 * h * a2, dE + 0.5 * h * b2);
      auto [a4, b4] = f(E + h * a3, dE + h * b3);
      E += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
      dE += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
      z += h;
    }
  }
  const double ka = k * s.ambient_index;
  const c A = 0.5 * (E + dE / (I * ka));
  const c B = 0.5 * (E - dE / (I * ka));
  TransferResult r;
  r.r = B / A;
  r.t = 1.0 / A;
  r.R = std::norm(r.r);
  r.T = s.substrate_index / s.ambient_index * std::norm(r.t);
  return r;
}

CavityGeometry air_cavity(double gap) {
  CavityGeometry g;
  g.air_gap = gap;
  g.diamond_thickness = 0.0;
  g.mirror_roc = 25e-6;
  g.input_mirror = LumpedMirror{1000.0, 0.0};
  g.output_mirror = LumpedMirror{1000.0, 0.0};
  return g;
}

}  // namespace

TEST(Stack, BareInterfaceMatchesFresnel) {
  LayerStack s{1.0, {}, 2.41};
  const auto r = transfer_matrix(s, lambda0);
  const double rf = (1.0 - 2.41) / (1.0 + 2.41);
  EXPECT_NEAR(r.r.real(), rf, 1e-12);
  EXPECT_NEAR(r.R, rf * rf, 1e-12);
  EXPECT_NEAR(r.R + r.T, 1.0, 1e-12);
}

TEST(Stack, QuarterWaveDiamondOnGlassAgreesWithHelmholtzIntegration) {
  const double nd = 2.41, ns = 1.45;
  LayerStack s{1.0, {Layer{lambda0 / (4.0 * nd), nd, 0.0}}, ns};
  const auto tm = transfer_matrix(s, lambda0);
  const auto rk = helmholtz_rk(s, lambda0);
  EXPECT_NEAR(std::abs(tm.r - rk.r), 0.0, 1e-9);
  EXPECT_NEAR(tm.T, rk.T, 1e-9);
  const double analytic = std::pow((1.0 * ns - nd * nd) / (1.0 * ns + nd * nd), 2);
  EXPECT_NEAR(tm.R, analytic, 1e-12);
}

TEST(Stack, MultilayerAgreesWithHelmholtzOffDesign) {
  LayerStack s{1.0, {Layer{83e-9, 1.95, 0.0}, Layer{121e-9, 1.46, 0.0}, Layer{410e-9, 2.41, 0.002}}, 1.45};
  for (double lam : {580e-9, 619e-9, 655e-9}) {
    const auto tm = transfer_matrix(s, lam);
    const auto rk = helmholtz_rk(s, lam);
    EXPECT_NEAR(tm.R, rk.R, 1e-9) << lam;
    EXPECT_NEAR(tm.T, rk.T, 1e-9) << lam;
  }
}

TEST(Stack, LosslessStackConservesEnergy) {
  auto m = quarter_wave_dbr(1.95, 1.46, 9, lambda0, 1.45);
  LayerStack s{1.0, {}, 1.45};
  for (const auto& l : m.layers) s.elements.push_back(l);
  s.elements.push_back(Layer{1.3e-6, 2.41, 0.0});
  for (double lam = 560e-9; lam < 680e-9; lam += 7.3e-9) {
    const auto r = transfer_matrix(s, lam);
    EXPECT_NEAR(r.R + r.T, 1.0, 1e-10) << lam;
  }
}

TEST(Stack, AbsorbingLayerLosesEnergy) {
  LayerStack s{1.0, {Layer{500e-9, 2.41, 0.01}}, 1.45};
  const auto r = transfer_matrix(s, lambda0);
  EXPECT_LT(r.R + r.T, 1.0 - 1e-4);
}

TEST(Stack, QuarterWaveDbrMatchesAdmittanceFormula) {
  for (int pairs : {6, 14, 18}) {
    const auto m = quarter_wave_dbr(1.95, 1.46, pairs, lambda0, 1.45);
    for (double n0 : {1.0, 2.41}) {
      const double Y = std::pow(1.95 / 1.46, 2 * pairs) * 1.45;
      const double T = 4.0 * n0 * Y / ((n0 + Y) * (n0 + Y));
      EXPECT_NEAR(mirror_transmittance_ppm(m, n0, lambda0), T * 1e6, 1e-6 * T * 1e6) << pairs << " " << n0;
    }
  }
}

TEST(Stack, LumpedMirrorTransmittance) {
  LumpedMirror m{2000.0, 100.0};
  EXPECT_NEAR(mirror_transmittance_ppm(m, 2.41, lambda0), 2000.0, 1e-6);
  LayerStack s{1.0, {m}, 1.0};
  const auto r = transfer_matrix(s, lambda0);
  EXPECT_NEAR(r.R, 1.0 - 2100e-6, 1e-12);
}

TEST(Stack, RejectsInvalidLayers) {
  LayerStack s{1.0, {Layer{-1e-9, 1.5, 0.0}}, 1.0};
  EXPECT_THROW(transfer_matrix(s, lambda0), ValidationError);
  EXPECT_THROW(quarter_wave_dbr(1.95, 1.46, -1, lambda0, 1.45), ValidationError);
  EXPECT_THROW(transfer_matrix(LayerStack{1.0, {}, 1.0}, -1.0), ValidationError);
}

TEST(Cavity, AirCavitySlopeIsMinusNuOverL) {
  const auto g = air_cavity(9.904e-6);
  const auto op = operating_point(g);
  const double nu = constants::c / op.wavelength;
  EXPECT_NEAR(op.slope / (-nu / g.air_gap), 1.0, 1e-4);
  EXPECT_EQ(op.branch, Branch::air_like);
}

TEST(Cavity, AirCavityFreeSpectralRange) {
  const auto g = air_cavity(9.904e-6);
  const double fsr = free_spectral_range(g, 619e-9);
  EXPECT_NEAR(fsr / (constants::c / (2.0 * g.air_gap)), 1.0, 1e-6);
}

TEST(Cavity, UniformCavityEffectiveLengthIsPhysicalLength) {
  const auto g = air_cavity(9.904e-6);
  const auto op = operating_point(g);
  const auto prof = field_profile(g, op.wavelength, 0.2e-9);
  EXPECT_NEAR(effective_length(prof) / g.air_gap, 1.0, 1e-3);
  EXPECT_EQ(prof.mode_number, 32);
}

TEST(Cavity, EffectiveLengthMatchesFineTrapezoid) {
  const auto g = paper_geometry();
  const auto op = operating_point(g);
  const auto prof = field_profile(g, op.wavelength);
  const double leff = effective_length(prof);

  double integral = 0.0, emax = 0.0;
  for (std::size_t k = 0; k < prof.segments.size(); ++k) {
    const auto& s = prof.segments[k];
    const double len = s.z_end - s.z_begin;
    if (len <= 0.0) continue;
    const int n = std::max(2, static_cast<int>(std::ceil(len / 0.05e-9)));
    const double h = len / n, n2 = std::norm(s.index);
    for (int i = 0; i <= n; ++i) {
      const double I = prof.intensity_at(std::min(s.z_begin + i * h, s.z_end));
      integral += (i == 0 || i == n ? 0.5 : 1.0) * h * n2 * I;
      if (k == prof.emitter_segment) emax = std::max(emax, I);
    }
  }
  const double nd = g.diamond_index;
  const double oracle = 2.0 * integral / (nd * nd * emax);
  EXPECT_NEAR(leff / oracle, 1.0, 1e-3);
  EXPECT_NEAR(leff, 10.8e-6, 0.1 * 10.8e-6);
}

TEST(Cavity, BeamWaistReproducesMirrorCurvature) {
  const auto g = paper_geometry();
  const double w0 = beam_waist(g);
  const double L = g.geometric_length();
  const double zr = constants::pi * w0 * w0 / g.wavelength;
  EXPECT_NEAR(L * (1.0 + zr * zr / (L * L)), g.mirror_roc, 1e-12);
  auto bad = g;
  bad.mirror_roc = 5e-6;
  EXPECT_THROW(beam_waist(bad), ValidationError);
}

TEST(Cavity, ModeVolumeAndPurcellIdentities) {
  const auto v = mode_volume(1.24e-6, 10.8e-6, 619e-9);
  EXPECT_NEAR(v.cubic_meters, constants::pi / 4.0 * 1.24e-6 * 1.24e-6 * 10.8e-6, 1e-30);
  EXPECT_NEAR(v.cubic_wavelengths, v.cubic_meters / std::pow(619e-9, 3), 1e-9);
  // F_P scales as Q / V and as n^-3.
  const double f = purcell_factor(619e-9, 2.41, 7e4, 55.0);
  EXPECT_NEAR(purcell_factor(619e-9, 2.41, 1.4e5, 55.0), 2.0 * f, 1e-12);
  EXPECT_NEAR(purcell_factor(619e-9, 2.41, 7e4, 110.0), 0.5 * f, 1e-12);
  EXPECT_NEAR(purcell_factor(619e-9, 1.0, 7e4, 55.0), f * std::pow(2.41, 3), 1e-9);
  EXPECT_NEAR(f, 3.0 / (4.0 * constants::pi * constants::pi) * 7e4 / (std::pow(2.41, 3) * 55.0), 1e-12);
}

TEST(Cavity, LossBudgetArithmetic) {
  EXPECT_NEAR(finesse_from_loss(7500.0), 838.0, 1.0);
  const double kappa = 6.86e9;
  const auto b = loss_budget(kappa, finesse_from_loss(7500.0) * kappa, 80.0, 2000.0);
  EXPECT_NEAR(b.total_loss_ppm, 7500.0, 1e-6);
  EXPECT_NEAR(b.excess_loss_ppm, 5420.0, 1e-6);
  EXPECT_FALSE(b.inconsistent);
  EXPECT_TRUE(loss_budget(kappa, 1e3 * kappa, 8000.0, 2000.0).inconsistent);
  EXPECT_THROW(loss_budget(kappa, 0.5 * kappa, 80.0, 2000.0), ValidationError);
}

TEST(Cavity, EmptyTransmissionLorentzianArea) {
  const double kappa = 6.86e9;
  const double tmax = empty_cavity_transmission(80.0, 2000.0, 7500.0, 0.0, kappa);
  EXPECT_NEAR(tmax, 4.0 * 80.0 * 2000.0 / (7500.0 * 7500.0), 1e-15);
  EXPECT_NEAR(empty_cavity_transmission(80.0, 2000.0, 7500.0, 0.5 * kappa, kappa), 0.5 * tmax, 1e-15);
  // Area of a Lorentzian of FWHM kappa: pi kappa tmax / 2.
  double area = 0.0;
  const double span = 4000.0 * kappa, h = kappa / 200.0;
  for (double d = -span; d <= span; d += h) area += h * empty_cavity_transmission(80.0, 2000.0, 7500.0, d, kappa);
  EXPECT_NEAR(area / (constants::pi * kappa * tmax / 2.0), 1.0, 1e-3);
}

TEST(Cavity, PaperGeometryOperatingPoint) {
  const auto d = characterize(paper_geometry(), 6.86e9, 7500.0);
  EXPECT_EQ(d.mode_number, 50);
  EXPECT_EQ(d.branch, Branch::air_like);
  EXPECT_NEAR(std::abs(d.dispersion_slope) * 1e-12, 46e6, 0.15 * 46e6);
  EXPECT_NEAR(d.input_transmittance_ppm, 80.0, 5.0);
  EXPECT_NEAR(d.output_transmittance_ppm, 2000.0, 50.0);
}

TEST(Cavity, DispersionReportsMissingResonances) {
  auto g = paper_geometry();
  const auto d = mode_dispersion(g, {6.5e-6}, 619.5e-9, 619.6e-9);
  EXPECT_TRUE(d.points.empty());
  EXPECT_FALSE(d.diagnostic.empty());
}

TEST(Cavity, AlteredGapFollowsTransferMatrixResonance) {
  auto g = paper_geometry();
  const auto d = mode_dispersion(g, {6.45e-6, 6.50e-6, 6.55e-6}, 612e-9, 626e-9);
  ASSERT_FALSE(d.points.empty());
  for (const auto& p : d.points) {
    auto at = g;
    at.air_gap = p.gap;
    EXPECT_NEAR(std::remainder(round_trip_phase(at, p.wavelength), constants::two_pi), 0.0, 1e-3);
  }
}
