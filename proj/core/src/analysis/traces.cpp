#include "cqed/analysis/traces.hpp"

#include <cmath>

#include "cqed/errors.hpp"

namespace cqed::analysis {

void ScanTrace::validate() const {
  require(frequency.size() == counts.size(), "frequency and counts differ in length");
  require(integration_time > 0.0, "integration time must be > 0");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    require(std::isfinite(counts[i]) && counts[i] >= 0.0, "counts must be finite and >= 0");
    require(std::isfinite(frequency[i]), "frequencies must be finite");
    if (i > 0) require(frequency[i] > frequency[i - 1], "frequency grid must be strictly increasing");
  }
}

void HistogramTrace::validate() const {
  require(time.size() == counts.size(), "time and counts differ in length");
  require(bin_width > 0.0, "bin width must be > 0");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    require(std::isfinite(counts[i]) && counts[i] >= 0.0, "counts must be finite and >= 0");
    if (i > 0) require(time[i] > time[i - 1], "time bins must be strictly increasing");
  }
}

}  // namespace cqed::analysis
