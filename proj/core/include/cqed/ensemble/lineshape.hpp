#pragma once

namespace cqed::ensemble {

struct LineshapeParams {
  double lorentzian_fwhm = 0.0;  // Hz
  double gaussian_fwhm = 0.0;    // Hz
  double center = 0.0;
  double amplitude = 1.0;
  double offset = 0.0;

  void validate() const;
};

// Area-normalized profiles.
double lorentzian_density(double x, double fwhm);
double gaussian_density(double x, double fwhm);
// Convolution of the two densities by adaptive Gauss-Kronrod quadrature.
double voigt_density(double x, double lorentzian_fwhm, double gaussian_fwhm);

// offset + amplitude * V(nu - center) / V(0).
double lineshape_eval(const LineshapeParams& p, double nu);

// Full width at half maximum of the Voigt profile, located by bisection.
double voigt_fwhm(double lorentzian_fwhm, double gaussian_fwhm);

// 0.5346 L + sqrt(0.2166 L^2 + G^2).
double olivero_fwhm(double lorentzian_fwhm, double gaussian_fwhm);

// 2 sqrt(2 ln 2) sigma for a Gaussian of standard deviation sigma.
double gaussian_fwhm_from_sigma(double sigma);

}  // namespace cqed::ensemble
