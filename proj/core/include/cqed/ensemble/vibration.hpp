#pragma once

#include <cstddef>
#include <vector>

namespace cqed::ensemble {

// Cavity length jitter mapped to frequency through the local dispersion slope.
struct VibrationSpec {
  double sigma_length = 27e-12;          // m RMS
  double dispersion_slope = 46e6 / 1e-12;  // Hz per m of cavity length

  void validate() const;
  double sigma_frequency() const;
};

struct DetuningWeights {
  std::vector<double> detuning;  // Hz
  std::vector<double> weight;    // sums to 1

  std::size_t size() const { return weight.size(); }
};

// Discretized Gaussian over [-halfwidth, halfwidth]. sigma = 0 gives a single delta at 0
// (the grid is kept so the caller sees the same layout).
DetuningWeights gaussian_detuning_weights(double sigma_nu, double halfwidth, int n_points);
DetuningWeights gaussian_detuning_weights(const VibrationSpec& spec, int n_points = 201,
                                          double halfwidth_sigmas = 5.0);

template <class F>
double vibration_average(F&& f, const DetuningWeights& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w.weight[i] != 0.0) acc += w.weight[i] * f(w.detuning[i]);
  return acc;
}

// C_max / (1 + 4 Q^2 (nu_e/nu_c - 1)^2).
double spectral_overlap(double c_max, double q_factor, double nu_e, double nu_c);

// Vibration-averaged over maximal cooperativity for a cavity of linewidth kappa.
double overlap_ratio(double kappa, const DetuningWeights& w);

}  // namespace cqed::ensemble
