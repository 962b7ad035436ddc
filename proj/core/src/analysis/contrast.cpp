#include "cqed/analysis/contrast.hpp"

#include <algorithm>
#include <cmath>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

namespace cqed::analysis {

DipContrast dip_contrast(const ScanTrace& trace, const DipContrastOptions& opt) {
  trace.validate();
  require(opt.running_window >= 1 && opt.core_points >= 1 && opt.excluded_points >= 0, "invalid dip options");
  const int n = static_cast<int>(trace.size());
  require(n > 2 * opt.excluded_points + 2 * opt.core_points, "trace too short for dip contrast estimation");
  const int h = opt.running_window / 2;
  int best = -1;
  double best_val = INFINITY;
  for (int i = h; i + h < n; ++i) {
    double s = 0.0;
    for (int j = i - h; j <= i + h; ++j) s += trace.counts[j];
    if (s < best_val) {
      best_val = s;
      best = i;
    }
  }
  // A flat-bottomed minimum is located at its middle.
  int last = best;
  while (last + 1 + h < n) {
    double s = 0.0;
    for (int j = last + 1 - h; j <= last + 1 + h; ++j) s += trace.counts[j];
    if (s != best_val) break;
    ++last;
  }
  best = (best + last) / 2;
  const int core_lo = best - opt.core_points / 2;
  const int core_hi = core_lo + opt.core_points;  // exclusive
  if (core_lo < 0 || core_hi > n) throw NumericError("dip too close to the trace edge");
  const int ex_lo = best - opt.excluded_points, ex_hi = best + opt.excluded_points;
  if (ex_lo <= 0 || ex_hi >= n - 1) throw NumericError("dip too close to the trace edge for a baseline on both sides");
  double depth = 0.0, base = 0.0;
  int nb = 0;
  for (int j = core_lo; j < core_hi; ++j) depth += trace.counts[j];
  for (int j = 0; j < n; ++j) {
    if (j >= ex_lo && j <= ex_hi) continue;
    base += trace.counts[j];
    ++nb;
  }
  DipContrast d;
  d.dip_index = static_cast<std::size_t>(best);
  const double sd = std::sqrt(depth) / opt.core_points;
  const double sb = std::sqrt(base) / nb;
  d.depth = depth / opt.core_points;
  d.baseline = base / nb;
  if (!(d.baseline > 0.0)) throw NumericError("zero baseline in dip contrast estimation");
  d.contrast = 1.0 - d.depth / d.baseline;
  d.sigma = std::hypot(sd / d.baseline, d.depth * sb / (d.baseline * d.baseline));
  return d;
}

Measured aggregate_contrast(const std::vector<ScanTrace>& traces, const DipContrastOptions& opt) {
  require(!traces.empty(), "no traces to aggregate");
  std::vector<double> c;
  for (const auto& t : traces) c.push_back(dip_contrast(t, opt).contrast);
  double mean = 0.0;
  for (double v : c) mean += v;
  mean /= static_cast<double>(c.size());
  double var = 0.0;
  for (double v : c) var += (v - mean) * (v - mean);
  const double sd = c.size() > 1 ? std::sqrt(var / static_cast<double>(c.size() - 1)) : 0.0;
  return {mean, sd};
}

double photons_per_lifetime(double power, double wavelength, double lifetime) {
  require(power >= 0.0 && wavelength > 0.0 && lifetime > 0.0, "invalid power conversion inputs");
  return power * wavelength * lifetime / (constants::h * constants::c);
}

std::vector<bool> trigger_gate(const std::vector<double>& contrast, double threshold) {
  std::vector<bool> out(contrast.size(), false);
  for (std::size_t k = 0; k < contrast.size(); ++k)
    out[k] = threshold <= 0.0 || (k > 0 && contrast[k - 1] > threshold);
  return out;
}

}  // namespace cqed::analysis
