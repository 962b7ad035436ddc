#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cqed/analysis/fitters.hpp"
#include "cqed/analysis/traces.hpp"

namespace cqed::analysis {

// One PLE acquisition: the phonon-sideband trace and, on cavity resonance, the
// simultaneously recorded transmission (ZPL) trace.
struct PleScan {
  ScanTrace psb;
  std::optional<ScanTrace> zpl;
};

struct OnResonanceCriteria {
  double band_low = 558e9;      // Hz, same axis as the trace
  double band_high = 559e9;
  double min_width = 100e6;     // Hz
  double min_contrast = 0.5;
  bool accept_all = false;
};

struct OffResonanceCriteria {
  double band_low = 558e9;
  double band_high = 559e9;
  double min_width = 30e6;
  double max_width = 500e6;
  double min_amplitude = 0.0;   // counts per point
  bool use_repump = true;       // reject scan k when scan k+1 needed a repump
  bool accept_all = false;
};

struct PostselectResult {
  ScanTrace sum;      // centered and summed counts, frequency relative to the fitted centers
  ScanTrace average;  // sum / accepted
  std::size_t accepted = 0;
  std::vector<int> accepted_ids;
  std::map<std::string, std::size_t> rejected;  // reason -> count
  FitResult fit;      // Lorentzian peak fit of `sum` (empty when nothing was accepted)
};

PostselectResult ple_postselect_on_resonance(const std::vector<PleScan>& scans,
                                             const OnResonanceCriteria& c = {});
PostselectResult ple_postselect_off_resonance(const std::vector<ScanTrace>& scans,
                                              const OffResonanceCriteria& c = {});

// Shifts each trace by a whole number of bins so that its center lands on zero,
// crops to the common overlap, and sums. All traces must share one uniform grid.
ScanTrace align_and_sum(const std::vector<ScanTrace>& traces, const std::vector<double>& centers);

}  // namespace cqed::analysis
