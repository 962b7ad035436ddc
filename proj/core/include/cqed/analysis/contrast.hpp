#pragma once

#include <vector>

#include "cqed/analysis/traces.hpp"
#include "cqed/measured.hpp"

namespace cqed::analysis {

struct DipContrastOptions {
  int running_window = 5;
  int core_points = 12;
  int excluded_points = 50;  // on each side of the dip, left out of the baseline
};

struct DipContrast {
  double contrast = 0.0;
  double depth = 0.0;
  double baseline = 0.0;
  double sigma = 0.0;        // Poisson propagation from the averaged counts
  std::size_t dip_index = 0;
};

DipContrast dip_contrast(const ScanTrace& trace, const DipContrastOptions& opt = {});

// Mean and sample standard deviation over several scans.
Measured aggregate_contrast(const std::vector<ScanTrace>& traces, const DipContrastOptions& opt = {});

// P lambda tau / (h c).
double photons_per_lifetime(double power, double wavelength, double lifetime);

// accepted[k] is true when contrast[k-1] > threshold. A non-positive threshold disables
// the gate and accepts every window, including the first one.
std::vector<bool> trigger_gate(const std::vector<double>& contrast, double threshold = 0.35);

}  // namespace cqed::analysis
