#pragma once

#include <cmath>

namespace cqed {

// Value with a 1-sigma uncertainty, propagated linearly.
struct Measured {
  double value = 0.0;
  double sigma = 0.0;
};

inline Measured exact(double v) { return {v, 0.0}; }

}  // namespace cqed
