#pragma once

#include <cstddef>
#include <vector>

namespace cqed::analysis {

struct ScanMetadata {
  bool repump_applied = false;  // charge repump preceded this scan
  int scan_id = 0;
  double laser_power = 0.0;     // W
};

// Photon counts per frequency step. Counts are stored as doubles but must be
// non-negative integers for Poisson weighting to make sense.
struct ScanTrace {
  std::vector<double> frequency;  // Hz
  std::vector<double> counts;
  double integration_time = 50e-3;  // s per point
  ScanMetadata metadata;

  std::size_t size() const { return frequency.size(); }
  void validate() const;
};

struct HistogramTrace {
  std::vector<double> time;  // bin start, s
  std::vector<double> counts;
  double bin_width = 0.25e-9;

  std::size_t size() const { return time.size(); }
  void validate() const;
};

}  // namespace cqed::analysis
