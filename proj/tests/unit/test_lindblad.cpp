#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"
#include "cqed/lindblad/correlation.hpp"
#include "cqed/lindblad/solver.hpp"
#include "cqed/lindblad/weak_drive.hpp"

using namespace cqed;
using namespace cqed::lindblad;
using constants::two_pi;

namespace {

SystemParams paper() {
  SystemParams p;
  p.xi = 1e3;
  return p;
}

std::vector<double> sorted_real(const Eigen::VectorXcd& v) {
  std::vector<double> out;
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i].real());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(System, JaynesCummingsLadder) {
  auto p = paper();
  p.xi = 0.0;
  const auto H = build_hamiltonian(p, HilbertConfig::fock(4));
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::vector<double> expect = {0.0};
  for (int n = 1; n <= 4; ++n) {
    expect.push_back(two_pi * p.g * std::sqrt(n));
    expect.push_back(-two_pi * p.g * std::sqrt(n));
  }
  // |4,e> has no partner inside the cutoff and sits at zero detuning.
  expect.push_back(0.0);
  std::sort(expect.begin(), expect.end());
  ASSERT_EQ(ev.size(), expect.size());
  for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(ev[i], expect[i], 1e-6 * two_pi * p.g);
}

TEST(System, HamiltonianIsHermitian) {
  auto p = paper();
  p.delta_e = 1.3e9;
  p.delta_c = -0.4e9;
  p.xi = 5e7;
  const auto H = build_hamiltonian(p, HilbertConfig::two_excitation());
  EXPECT_LT((H - H.adjoint()).norm(), 1e-9 * H.norm());
  EXPECT_EQ(HilbertConfig::two_excitation().dimension(), 5);
  EXPECT_EQ(HilbertConfig::fock(3).dimension(), 8);
}

TEST(System, CoherenceDecaysAtHalfTheLinewidth) {
  auto p = paper();
  p.g = 0.0;
  p.xi = 0.0;
  const auto L = build_liouvillian(p, HilbertConfig::fock(1));
  Eigen::ComplexEigenSolver<Matrix> es(L.matrix);
  const auto re = sorted_real(es.eigenvalues());
  const double rate = -constants::pi * (p.gamma + p.gamma_dp);
  const bool found = std::any_of(re.begin(), re.end(), [&](double x) { return std::abs(x - rate) < 1e-6 * std::abs(rate); });
  EXPECT_TRUE(found);
  const double population = -two_pi * p.gamma;
  EXPECT_TRUE(std::any_of(re.begin(), re.end(), [&](double x) { return std::abs(x - population) < 1e-6 * std::abs(population); }));
}

TEST(System, VectorizationIsColumnStacking) {
  Matrix A = Matrix::Random(3, 3), X = Matrix::Random(3, 3), B = Matrix::Random(3, 3);
  Matrix K(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) K.block(3 * i, 3 * j, 3, 3) = B(j, i) * A;
  EXPECT_LT((K * vectorize(X) - vectorize(A * X * B)).norm(), 1e-12);
  EXPECT_LT((unvectorize(vectorize(X), 3) - X).norm(), 0.0 + 1e-15);
}

TEST(System, ThermalPopulation) {
  const double x = constants::h * 850e9 / (constants::k_B * 8.0);
  EXPECT_NEAR(thermal_upper_branch_population(850e9, 8.0), 1.0 / (1.0 + std::exp(x)), 1e-15);
  EXPECT_LT(thermal_upper_branch_population(850e9, 8.0), 0.01);
  EXPECT_NEAR(thermal_upper_branch_population(0.0, 4.0), 0.5, 1e-15);
  EXPECT_THROW(thermal_upper_branch_population(850e9, 0.0), ValidationError);
}

TEST(Solver, NoDriveGivesVacuum) {
  auto p = paper();
  p.xi = 0.0;
  const auto o = solve_observables(p, HilbertConfig::fock(3));
  EXPECT_NEAR(o.photons, 0.0, 1e-12);
  EXPECT_NEAR(o.excited, 0.0, 1e-12);
}

TEST(Solver, SteadyStateIsPhysical) {
  auto p = paper();
  p.xi = 3e8;
  const auto hilbert = HilbertConfig::fock(6);
  const auto L = build_liouvillian(p, hilbert);
  const auto rho = steady_state(L);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
  EXPECT_LT((rho - rho.adjoint()).norm(), 1e-10);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10);
  EXPECT_LT(residual_norm(L, rho), 1e-10);
}

TEST(Solver, EmptyCavityLorentzian) {
  auto p = paper();
  p.g = 0.0;
  const double tmax = empty_transmission_max(p);
  EXPECT_NEAR(tmax, 4.0 * p.kappa_in * p.kappa_out / (p.kappa * p.kappa), 1e-15);
  for (double dc : {0.0, 1e9, 3.43e9, -7e9}) {
    p.delta_c = dc;
    const double x = 2.0 * dc / p.kappa;
    EXPECT_NEAR(transmission(p) / (tmax / (1.0 + x * x)), 1.0, 1e-6) << dc;
  }
}

TEST(Solver, VacuumRabiSplitting) {
  SystemParams p;
  p.g = 1e9;
  p.kappa = 0.05e9;
  p.kappa_in = p.kappa_out = 0.025e9;
  p.gamma = 0.01e9;
  p.gamma_dp = 0.0;
  p.xi = 1e3;
  std::vector<double> probe;
  for (double d = 0.8e9; d <= 1.2e9; d += 1e6) probe.push_back(d);
  const auto s = transmission_spectrum(p, probe);
  const auto k = std::max_element(s.transmission.begin(), s.transmission.end()) - s.transmission.begin();
  EXPECT_NEAR(probe[k], p.g, 2e6);
}

TEST(Solver, TwoExcitationBasisMatchesFockTwoAtWeakDrive) {
  auto p = paper();
  for (double d : {0.0, 0.4e9, -2e9}) {
    p.delta_e = d;
    p.delta_c = d + 1e9;
    const double a = transmission(p, HilbertConfig::two_excitation());
    const double b = transmission(p, HilbertConfig::fock(2));
    EXPECT_NEAR(a / b, 1.0, 1e-6) << d;
  }
}

TEST(Solver, DetuningSignFlipSymmetry) {
  auto p = paper();
  p.delta_e = 0.7e9;
  p.delta_c = -1.9e9;
  const double a = transmission(p);
  p.delta_e = -p.delta_e;
  p.delta_c = -p.delta_c;
  EXPECT_NEAR(transmission(p) / a, 1.0, 1e-9);
}

TEST(WeakDrive, ResonantContrastAgainstMomentEquations) {
  auto p = paper();
  const auto w = weak_drive_analytic(p);
  // The coherent part alone follows 1 / (1 + C)^2 on resonance.
  EXPECT_NEAR(w.coherent_transmission / empty_transmission_max(p), 1.0 / std::pow(1.0 + p.cooperativity(), 2), 1e-9);
  EXPECT_NEAR(w.transmission / empty_transmission_max(p), 0.44362, 1e-4);
  p.xi = 0.2 * two_pi * p.kappa;
  EXPECT_THROW(weak_drive_analytic(p), ValidationError);
}

TEST(WeakDrive, AmplitudeMatchesSteadyState) {
  auto p = paper();
  p.delta_e = 0.2e9;
  p.delta_c = -0.9e9;
  const auto w = weak_drive_analytic(p);
  const auto o = solve_observables(p, HilbertConfig::fock(2));
  EXPECT_NEAR(std::abs(o.field - w.amplitude) / std::abs(w.amplitude), 0.0, 1e-6);
}

TEST(WeakDrive, GridAgreementWithinOnePercent) {
  auto p = paper();
  for (double de : {-2e9, -0.5e9, 0.0, 0.5e9, 2e9})
    for (double dc : {-3e9, -1e9, 0.0, 1e9, 3e9})
      for (double g : {0.1e9, 0.3e9, 0.6e9}) {
        p.delta_e = de;
        p.delta_c = dc;
        p.g = g;
        const double full = transmission(p, HilbertConfig::fock(2));
        const double lin = weak_drive_analytic(p).transmission;
        EXPECT_NEAR(full / lin, 1.0, 0.01) << de << " " << dc << " " << g;
      }
}

TEST(WeakDrive, DriveCalibration) {
  auto p = paper();
  const double tau = 1.85e-9;
  p.xi = drive_for_photons_per_lifetime(p, 0.25, tau);
  const double out = p.input_flux() * empty_transmission_max(p) * tau;
  EXPECT_NEAR(out, 0.25, 1e-12);
  EXPECT_NEAR(p.input_flux(), p.xi * p.xi / (two_pi * p.kappa_in), 1e-6 * p.input_flux());
}

TEST(Correlation, NoCouplingGivesCoherentLight) {
  auto p = paper();
  p.g = 0.0;
  p.xi = 1e8;
  const auto c = g2_transmitted(p, {0.0, 0.5e-9, 2e-9});
  for (double v : c.g2) EXPECT_NEAR(v, 1.0, 1e-6);
}

TEST(Correlation, BunchingAndDecorrelation) {
  auto p = paper();
  p.xi = 1e6;
  const double tau_p = 5e-9 / (1.0 + 1.7);
  G2Options opt;
  opt.cross_check = true;
  const auto c = g2_transmitted(p, {0.0, 1e-9, 50.0 * tau_p}, opt);
  EXPECT_GT(c.g2[0], 1.0);
  EXPECT_GT(c.g2[0], c.g2[1]);
  EXPECT_NEAR(c.g2[2], 1.0, 1e-3);
}

TEST(Correlation, CutoffConvergence) {
  auto p = paper();
  p.xi = 1e7;
  G2Options a, b;
  a.cutoff = 8;
  a.auto_raise = false;
  b.cutoff = 10;
  b.auto_raise = false;
  const double g8 = g2_transmitted(p, {0.0}, a).g2[0];
  const double g10 = g2_transmitted(p, {0.0}, b).g2[0];
  EXPECT_NEAR(g8, g10, 1e-3);
}

TEST(Correlation, PropagatorsAgree) {
  auto p = paper();
  p.xi = 1e7;
  G2Options a, b;
  a.method = Propagator::expm;
  b.method = Propagator::rk45;
  const std::vector<double> tau = {0.0, 0.3e-9, 1.7e-9, 6e-9};
  const auto x = g2_transmitted(p, tau, a), y = g2_transmitted(p, tau, b);
  for (std::size_t i = 0; i < tau.size(); ++i) EXPECT_NEAR(x.g2[i], y.g2[i], 1e-6);
}

TEST(Correlation, WindowedNormalization) {
  std::vector<IntensityMoments> w = {{1.0, 2.0}, {3.0, 9.0}};
  EXPECT_NEAR(windowed_g2_zero(w), 11.0 / 10.0, 1e-15);
}

TEST(Saturation, ContrastFallsWithDrive) {
  auto p = paper();
  SaturationOptions opt;
  opt.purcell_lifetime = 1.85e-9;
  const auto s = saturation_curve(p, {0.001, 0.1, 1.0, 5.0}, opt);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(s[i].contrast, s[i - 1].contrast);
  EXPECT_NEAR(s[0].contrast, 1.0 - 0.44362, 5e-3);
}
