#include "cqed/ensemble/lineshape.hpp"

#include <algorithm>
#include <cmath>
#include <vector>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cqed/errors.hpp"

namespace cqed::ensemble {

namespace {

const double kFwhmPerSigma = 2.0 * std::sqrt(2.0 * std::numbers::ln2);

double integrate(const auto& f, double a, double b) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-13, &err);
}

}  // namespace

void LineshapeParams::validate() const {
  require(lorentzian_fwhm >= 0.0 && gaussian_fwhm >= 0.0, "FWHMs must be >= 0");
  require(lorentzian_fwhm > 0.0 || gaussian_fwhm > 0.0, "at least one FWHM must be > 0");
}

double gaussian_fwhm_from_sigma(double sigma) { return kFwhmPerSigma * sigma; }

double lorentzian_density(double x, double fwhm) {
  const double h = 0.5 * fwhm;
  return h / (std::numbers::pi * (x * x + h * h));
}

double gaussian_density(double x, double fwhm) {
  const double s = fwhm / kFwhmPerSigma;
  return std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2.0 * std::numbers::pi));
}

double voigt_density(double x, double lf, double gf) {
  require(lf >= 0.0 && gf >= 0.0 && (lf > 0.0 || gf > 0.0), "invalid Voigt widths");
  if (gf == 0.0) return lorentzian_density(x, lf);
  if (lf == 0.0 || lf < 1e-7 * gf) return gaussian_density(x, gf);
  // Integrate over the Gaussian variable u on +-8 sigma with breakpoints at the Gaussian
  // center and around the Lorentzian center u = x.
  const double s = gf / kFwhmPerSigma;
  const double lo = -8.0 * s, hi = 8.0 * s;
  auto f = [&](double u) { return gaussian_density(u, gf) * lorentzian_density(x - u, lf); };
  std::vector<double> pts{lo, hi, 0.0, x, x - 10.0 * lf, x + 10.0 * lf};
  std::erase_if(pts, [&](double v) { return v < lo || v > hi; });
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) acc += integrate(f, pts[i], pts[i + 1]);
  return acc;
}

double lineshape_eval(const LineshapeParams& p, double nu) {
  p.validate();
  const double peak = voigt_density(0.0, p.lorentzian_fwhm, p.gaussian_fwhm);
  return p.offset + p.amplitude * voigt_density(nu - p.center, p.lorentzian_fwhm, p.gaussian_fwhm) / peak;
}

double voigt_fwhm(double lf, double gf) {
  require(lf >= 0.0 && gf >= 0.0 && (lf > 0.0 || gf > 0.0), "invalid Voigt widths");
  const double half = 0.5 * voigt_density(0.0, lf, gf);
  double a = 0.0, b = lf + gf;
  while (voigt_density(b, lf, gf) > half) b *= 2.0;
  for (int i = 0; i < 200 && b - a > 1e-13 * (lf + gf); ++i) {
    const double m = 0.5 * (a + b);
    (voigt_density(m, lf, gf) > half ? a : b) = m;
  }
  return a + b;  // 2 * half width
}

double olivero_fwhm(double lf, double gf) { return 0.5346 * lf + std::sqrt(0.2166 * lf * lf + gf * gf); }

}  // namespace cqed::ensemble
