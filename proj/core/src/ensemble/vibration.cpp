#include "cqed/ensemble/vibration.hpp"

#include <cmath>

#include "cqed/errors.hpp"

namespace cqed::ensemble {

void VibrationSpec::validate() const {
  require(std::isfinite(sigma_length) && sigma_length >= 0.0, "vibration RMS length must be >= 0");
  require(std::isfinite(dispersion_slope), "dispersion slope must be finite");
}

double VibrationSpec::sigma_frequency() const {
  validate();
  return sigma_length * std::abs(dispersion_slope);
}

DetuningWeights gaussian_detuning_weights(double sigma, double halfwidth, int n_points) {
  require(n_points >= 3 && n_points % 2 == 1, "vibration grid needs an odd number of points >= 3");
  require(std::isfinite(sigma) && sigma >= 0.0, "sigma must be >= 0");
  DetuningWeights w;
  w.detuning.resize(n_points);
  w.weight.assign(n_points, 0.0);
  const int mid = n_points / 2;
  if (sigma == 0.0) {
    const double h = halfwidth > 0.0 ? halfwidth : 0.0;
    for (int i = 0; i < n_points; ++i) w.detuning[i] = h * (i - mid) / mid;
    w.detuning[mid] = 0.0;
    w.weight[mid] = 1.0;
    return w;
  }
  require(halfwidth >= 4.0 * sigma * (1.0 - 1e-12), "grid halfwidth must cover at least 4 sigma");
  double sum = 0.0;
  for (int i = 0; i < n_points; ++i) {
    const double x = halfwidth * static_cast<double>(i - mid) / mid;
    w.detuning[i] = x;
    w.weight[i] = std::exp(-0.5 * x * x / (sigma * sigma));
    sum += w.weight[i];
  }
  for (auto& v : w.weight) v /= sum;
  // enforce exact symmetry
  for (int i = 0; i < mid; ++i) {
    const double s = 0.5 * (w.weight[i] + w.weight[n_points - 1 - i]);
    w.weight[i] = w.weight[n_points - 1 - i] = s;
  }
  return w;
}

DetuningWeights gaussian_detuning_weights(const VibrationSpec& spec, int n_points, double halfwidth_sigmas) {
  const double s = spec.sigma_frequency();
  return gaussian_detuning_weights(s, halfwidth_sigmas * s, n_points);
}

double spectral_overlap(double c_max, double q, double nu_e, double nu_c) {
  require(nu_e > 0.0 && nu_c > 0.0, "frequencies must be > 0");
  const double x = nu_e / nu_c - 1.0;
  return c_max / (1.0 + 4.0 * q * q * x * x);
}

double overlap_ratio(double kappa, const DetuningWeights& w) {
  require(kappa > 0.0, "kappa must be > 0");
  return vibration_average(
      [&](double d) {
        const double x = 2.0 * d / kappa;
        return 1.0 / (1.0 + x * x);
      },
      w);
}

}  // namespace cqed::ensemble
