#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cqed/analysis/contrast.hpp"
#include "cqed/analysis/fitters.hpp"
#include "cqed/analysis/least_squares.hpp"
#include "cqed/analysis/postselect.hpp"
#include "cqed/ensemble/lineshape.hpp"
#include "cqed/errors.hpp"

using namespace cqed;
using namespace cqed::analysis;

namespace {

ScanTrace line_trace(double center, double fwhm, double amp, double offset, LineMode mode, int n = 201,
                     double lo = -1e9, double hi = 1e9) {
  ScanTrace t;
  for (int i = 0; i < n; ++i) {
    const double f = lo + (hi - lo) * i / (n - 1);
    const double x = 2.0 * (f - center) / fwhm;
    const double l = amp / (1.0 + x * x);
    t.frequency.push_back(f);
    t.counts.push_back(mode == LineMode::peak ? offset + l : offset - l);
  }
  return t;
}

HistogramTrace decay(double tau, double amp, double fast, double fast_tau, double bg, int bins = 200) {
  HistogramTrace h;
  h.bin_width = 0.25e-9;
  for (int i = 0; i < bins; ++i) {
    const double t = i * h.bin_width;
    double c = bg;
    if (t >= 2e-9) c += amp * std::exp(-(t - 2e-9) / tau) + fast * std::exp(-(t - 2e-9) / fast_tau);
    h.time.push_back(t);
    h.counts.push_back(c);
  }
  return h;
}

}  // namespace

TEST(LeastSquares, RecoversNoiselessParameters) {
  CurveModel m;
  m.value = [](double x, const Eigen::VectorXd& p) { return p[0] * std::exp(-x / p[1]) + p[2] * x; };
  Eigen::VectorXd x(40), y(40), w = Eigen::VectorXd::Ones(40);
  for (int i = 0; i < 40; ++i) {
    x[i] = 0.1 * i;
    y[i] = 3.0 * std::exp(-x[i] / 0.7) + 0.25 * x[i];
  }
  Eigen::VectorXd p0(3);
  p0 << 1.0, 2.0, 0.0;
  const auto r = levenberg_marquardt(m, x, y, w, p0);
  ASSERT_TRUE(r.converged) << r.message;
  EXPECT_NEAR(r.parameters[0], 3.0, 1e-8);
  EXPECT_NEAR(r.parameters[1], 0.7, 1e-8);
  EXPECT_NEAR(r.parameters[2], 0.25, 1e-8);
  EXPECT_LT(r.chi2, 1e-16);
  EXPECT_EQ(r.dof, 37);
}

TEST(LeastSquares, LinearModelCovarianceMatchesNormalEquations) {
  CurveModel m;
  m.value = [](double x, const Eigen::VectorXd& p) { return p[0] + p[1] * x; };
  m.gradient = [](double x, const Eigen::VectorXd&, Eigen::Ref<Eigen::VectorXd> g) {
    g[0] = 1.0;
    g[1] = x;
  };
  Eigen::VectorXd x(5), y(5), w(5);
  x << 0, 1, 2, 3, 4;
  y << 1.1, 2.9, 5.2, 7.1, 8.8;
  w << 1, 2, 1, 0.5, 1;
  const auto r = levenberg_marquardt(m, x, y, w, Eigen::VectorXd::Zero(2));
  Eigen::MatrixXd J(5, 2);
  J.col(0).setOnes();
  J.col(1) = x;
  const Eigen::MatrixXd N = J.transpose() * w.asDiagonal() * J;
  const Eigen::VectorXd p = N.ldlt().solve(J.transpose() * w.asDiagonal() * y);
  EXPECT_NEAR((r.parameters - p).norm(), 0.0, 1e-9);
  EXPECT_NEAR((r.covariance - N.inverse()).norm(), 0.0, 1e-9);
}

TEST(Fitters, LorentzianPeakAndDip) {
  for (auto mode : {LineMode::peak, LineMode::dip}) {
    const auto t = line_trace(0.12e9, 0.3e9, 400.0, 1000.0, mode);
    const auto f = fit_lorentzian(t, mode);
    ASSERT_TRUE(f.success) << f.diagnostic;
    EXPECT_NEAR(f.value("center"), 0.12e9, 1e3);
    EXPECT_NEAR(f.value("fwhm"), 0.3e9, 1e3);
    EXPECT_NEAR(f.value("amplitude"), 400.0, 1e-4);
    EXPECT_NEAR(f.value("offset"), 1000.0, 1e-4);
  }
}

TEST(Fitters, VoigtWithoutGaussianIsLorentzian) {
  const auto t = line_trace(-0.05e9, 0.25e9, 300.0, 20.0, LineMode::peak);
  const auto l = fit_lorentzian(t, LineMode::peak);
  const auto v = fit_voigt_fixed_gaussian(t, 0.0, LineMode::peak);
  ASSERT_TRUE(v.success) << v.diagnostic;
  EXPECT_NEAR(v.value("lorentzian_fwhm"), l.value("fwhm"), 1e-6 * l.value("fwhm"));
  EXPECT_NEAR(v.value("center"), l.value("center"), 1e3);
}

TEST(Fitters, VoigtRecoversLorentzianPart) {
  ensemble::LineshapeParams p{6.86e9, 2.92e9, 0.4e9, 1e4, 50.0};
  ScanTrace t;
  for (int i = 0; i < 301; ++i) {
    const double f = -30e9 + 60e9 * i / 300.0;
    t.frequency.push_back(f);
    t.counts.push_back(ensemble::lineshape_eval(p, f));
  }
  const auto v = fit_voigt_fixed_gaussian(t, 2.92e9);
  ASSERT_TRUE(v.success) << v.diagnostic;
  EXPECT_NEAR(v.value("lorentzian_fwhm"), 6.86e9, 1e-5 * 6.86e9);
  EXPECT_NEAR(v.value("center"), 0.4e9, 1e4);
}

TEST(Fitters, PoissonSigmasAreCalibrated) {
  std::mt19937_64 rng(2024);
  const auto truth = line_trace(0.0, 0.2e9, 200.0, 10.0, LineMode::peak);
  double s1 = 0.0, s2 = 0.0;
  const int n = 300;
  for (int k = 0; k < n; ++k) {
    auto t = truth;
    for (auto& c : t.counts) c = std::poisson_distribution<int>(c)(rng);
    const auto f = fit_lorentzian(t, LineMode::peak);
    ASSERT_TRUE(f.success);
    const double pull = (f.value("fwhm") - 0.2e9) / f.sigma("fwhm");
    s1 += pull;
    s2 += pull * pull;
  }
  const double mean = s1 / n, sd = std::sqrt(s2 / n - mean * mean);
  EXPECT_NEAR(mean, 0.0, 0.2);
  EXPECT_NEAR(sd, 1.0, 0.12);
}

TEST(Fitters, FlatTraceFailsSignificance) {
  ScanTrace t;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 101; ++i) {
    t.frequency.push_back(i * 1e7);
    t.counts.push_back(std::poisson_distribution<int>(100.0)(rng));
  }
  EXPECT_FALSE(fit_lorentzian(t, LineMode::peak).success);
}

TEST(Fitters, ExponentialWithExplicitWindow) {
  const auto h = decay(2.55e-9, 4000.0, 0.0, 0.3e-9, 2.0);
  const auto f = fit_monoexponential(h, 2e-9);
  ASSERT_TRUE(f.success) << f.diagnostic;
  EXPECT_NEAR(f.value("tau"), 2.55e-9, 1e-14);
  EXPECT_NEAR(f.value("offset"), 2.0, 1e-6);
  EXPECT_NEAR(f.window_begin, 2e-9, 1e-15);
  EXPECT_NEAR(f.window_end - f.window_begin, 10e-9, 0.25e-9);
}

TEST(Fitters, AutomaticWindowSkipsFastDecay) {
  const auto h = decay(2.55e-9, 4000.0, 4000.0, 0.3e-9, 2.0);
  ExpFitOptions opt;
  opt.fast_fraction = 0.01;
  const auto k = auto_window_start(h, opt);
  const double t = h.time[k] - 2e-9;
  // fast/slow = exp(-t/0.3 + t/2.55) must be below 1 %
  EXPECT_LT(std::exp(-t / 0.3e-9 + t / 2.55e-9), 0.01);
  EXPECT_GT(std::exp(-(t - h.bin_width) / 0.3e-9 + (t - h.bin_width) / 2.55e-9), 0.01 * 0.5);
  const auto f = fit_monoexponential(h, std::nullopt, opt);
  EXPECT_NEAR(f.value("tau"), 2.55e-9, 0.01e-9);
}

TEST(Fitters, RejectsMalformedInput) {
  HistogramTrace h;
  h.time = {0.0, 1e-9};
  h.counts = {1.0};
  EXPECT_THROW(fit_monoexponential(h, 0.0), ValidationError);
  ScanTrace t;
  t.frequency = {0.0, 1.0, 0.5};
  t.counts = {1.0, 2.0, 3.0};
  EXPECT_THROW(fit_lorentzian(t, LineMode::peak), ValidationError);
}

TEST(Contrast, KnownDipDepth) {
  ScanTrace t;
  for (int i = 0; i < 301; ++i) {
    t.frequency.push_back(i * 6e6);
    t.counts.push_back(std::abs(i - 150) <= 8 ? 40.0 : 100.0);
  }
  const auto d = dip_contrast(t);
  EXPECT_NEAR(d.contrast, 0.6, 1e-12);
  EXPECT_NEAR(d.baseline, 100.0, 1e-12);
  EXPECT_EQ(d.dip_index, 150u);
}

TEST(Contrast, ScaleInvariance) {
  const auto t = line_trace(0.0, 0.2e9, 300.0, 600.0, LineMode::dip, 301);
  auto u = t;
  for (auto& c : u.counts) c *= 3.7;
  EXPECT_NEAR(dip_contrast(t).contrast, dip_contrast(u).contrast, 1e-12);
  const auto agg = aggregate_contrast({t, u});
  EXPECT_NEAR(agg.value, dip_contrast(t).contrast, 1e-12);
  EXPECT_NEAR(agg.sigma, 0.0, 1e-12);
}

TEST(Contrast, PhotonsPerLifetime) {
  EXPECT_NEAR(photons_per_lifetime(2.6e-12, 619e-9, 1.85e-9), 0.015, 0.0005);
  EXPECT_DOUBLE_EQ(photons_per_lifetime(0.0, 619e-9, 1.85e-9), 0.0);
  EXPECT_THROW(photons_per_lifetime(1e-12, 619e-9, 0.0), ValidationError);
}

TEST(Contrast, TriggerGate) {
  const std::vector<double> c = {0.5, 0.1, 0.36, 0.35, 0.9};
  EXPECT_EQ(trigger_gate(c, 0.35), (std::vector<bool>{false, true, false, true, false}));
  EXPECT_EQ(trigger_gate(c, 0.0), std::vector<bool>(5, true));
  EXPECT_EQ(trigger_gate(c, -1.0), std::vector<bool>(5, true));
  EXPECT_TRUE(trigger_gate({}, 0.35).empty());
}

TEST(Postselect, AlignAndSumShiftsByWholeBins) {
  const auto a = line_trace(0.1e9, 0.2e9, 100.0, 0.0, LineMode::peak, 201);
  const auto b = line_trace(-0.2e9, 0.2e9, 100.0, 0.0, LineMode::peak, 201);
  const auto s = align_and_sum({a, b}, {0.1e9, -0.2e9});
  const auto k = std::max_element(s.counts.begin(), s.counts.end()) - s.counts.begin();
  EXPECT_NEAR(s.frequency[k], 0.0, 1.0);
  EXPECT_NEAR(s.counts[k], 200.0, 1e-9);
  EXPECT_EQ(s.size(), 201u - 30u);
}

TEST(Postselect, AcceptAllAveragesCenteredTraces) {
  std::vector<ScanTrace> scans;
  std::vector<double> centers = {558.4e9, 558.5e9, 558.55e9};
  for (double c : centers) {
    auto t = line_trace(c, 80e6, 50.0, 2.0, LineMode::peak, 201, 558e9, 559e9);
    scans.push_back(t);
  }
  OffResonanceCriteria crit;
  crit.accept_all = true;
  const auto r = ple_postselect_off_resonance(scans, crit);
  EXPECT_EQ(r.accepted, 3u);
  const auto plain = align_and_sum(scans, centers);
  ASSERT_EQ(r.average.size(), plain.size());
  for (std::size_t i = 0; i < plain.size(); ++i) EXPECT_NEAR(r.average.counts[i], plain.counts[i] / 3.0, 1e-6);
  EXPECT_NEAR(r.fit.value("fwhm"), 80e6, 1e5);
}

TEST(Postselect, OffResonanceRejectsIonizedScans) {
  std::vector<ScanTrace> scans;
  for (int k = 0; k < 4; ++k) {
    auto t = line_trace(558.5e9, 80e6, 50.0, 2.0, LineMode::peak, 201, 558e9, 559e9);
    t.metadata.scan_id = k;
    t.metadata.repump_applied = k == 2;
    scans.push_back(t);
  }
  const auto r = ple_postselect_off_resonance(scans);
  EXPECT_EQ(r.accepted, 2u);
  EXPECT_EQ(r.rejected.at("ionized"), 1u);
  EXPECT_EQ(r.rejected.at("unknown_charge_state"), 1u);
  EXPECT_EQ(r.accepted_ids, (std::vector<int>{0, 2}));
}

TEST(Postselect, OnResonanceNeedsDeepWideDip) {
  std::vector<PleScan> scans;
  for (double depth : {0.7, 0.2}) {
    PleScan s;
    s.psb = line_trace(558.5e9, 126e6, 50.0, 2.0, LineMode::peak, 201, 558e9, 559e9);
    s.zpl = line_trace(558.5e9, 150e6, 1000.0 * depth, 1000.0, LineMode::dip, 201, 558e9, 559e9);
    scans.push_back(s);
  }
  PleScan missing;
  missing.psb = scans[0].psb;
  scans.push_back(missing);
  const auto r = ple_postselect_on_resonance(scans);
  EXPECT_EQ(r.accepted, 1u);
  EXPECT_EQ(r.rejected.at("low_contrast"), 1u);
  EXPECT_EQ(r.rejected.at("missing_transmission"), 1u);
}
