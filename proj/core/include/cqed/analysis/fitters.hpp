#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqed/analysis/traces.hpp"

namespace cqed::analysis {

struct FitParameter {
  std::string name;
  double value = 0.0;
  double sigma = 0.0;
};

struct FitResult {
  std::string model;
  std::vector<FitParameter> parameters;
  double window_begin = 0.0;
  double window_end = 0.0;
  double reduced_chi2 = 0.0;
  int dof = 0;
  bool success = false;
  std::string diagnostic;

  const FitParameter& at(const std::string& name) const;
  double value(const std::string& name) const { return at(name).value; }
  double sigma(const std::string& name) const { return at(name).sigma; }
};

enum class LineMode { peak, dip };

// poisson: variance max(counts, 1), absolute covariance. uniform: unit weights,
// covariance scaled by the reduced chi^2.
enum class Weighting { poisson, uniform };

struct FitOptions {
  Weighting weighting = Weighting::poisson;
  double min_significance = 2.0;  // |amplitude| / sigma below this marks a failed fit
};

// offset +- amplitude / (1 + (2 (f - center) / fwhm)^2); parameters center, fwhm, amplitude, offset.
FitResult fit_lorentzian(const ScanTrace& trace, LineMode mode, const FitOptions& opt = {});

// Peak-normalized Voigt with the Gaussian FWHM frozen; parameters center, lorentzian_fwhm, amplitude, offset.
FitResult fit_voigt_fixed_gaussian(const ScanTrace& trace, double gaussian_fwhm, LineMode mode = LineMode::peak,
                                   const FitOptions& opt = {});

struct ExpFitOptions {
  Weighting weighting = Weighting::poisson;
  double window_length = 10e-9;
  double fast_fraction = 0.05;  // auto start: fast excess below this fraction of the slow signal
  int min_bins = 10;
};

// amplitude * exp(-(t - t0) / tau) + offset on [t0, t0 + window_length). Without a start the
// window begins at the first bin after the peak where the fast component is below
// `fast_fraction` of the slow signal. Parameters tau, amplitude, offset.
FitResult fit_monoexponential(const HistogramTrace& hist, std::optional<double> window_start = std::nullopt,
                              const ExpFitOptions& opt = {});

// Index of the auto-selected window start.
std::size_t auto_window_start(const HistogramTrace& hist, const ExpFitOptions& opt = {});

}  // namespace cqed::analysis
