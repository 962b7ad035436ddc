#pragma once

#include <vector>

#include "cqed/ensemble/vibration.hpp"
#include "cqed/lindblad/system.hpp"

namespace cqed::lindblad {

enum class Propagator { expm, rk45 };

struct G2Options {
  int cutoff = 8;
  bool auto_raise = true;
  int max_cutoff = 20;
  double convergence_tol = 1e-3;  // |g2_N(0) - g2_{N+2}(0)|
  Propagator method = Propagator::expm;
  bool cross_check = false;       // also run the other propagator and require agreement
  double cross_check_tol = 1e-6;
  double rk_rel_tol = 1e-10;
};

struct G2Curve {
  std::vector<double> tau;  // s
  std::vector<double> g2;
  int cutoff = 0;
  double photons = 0.0;
};

// Quantum regression: Tr[a^dag a e^{L tau}(a rho a^dag)] / <a^dag a>^2 for tau >= 0.
G2Curve g2_transmitted(const SystemParams& p, const std::vector<double>& tau, const G2Options& opt = {});

// Unnormalized moments used when combining several operating points.
struct IntensityMoments {
  double photons = 0.0;      // <a^dag a>
  double coincidence = 0.0;  // <a^dag a^dag a a>
};

IntensityMoments intensity_moments(const SystemParams& p, const HilbertConfig& hilbert);
IntensityMoments averaged_moments(const SystemParams& p, const HilbertConfig& hilbert,
                                  const ensemble::DetuningWeights& w);

// Windows are normalized separately: sum_k G2_k / sum_k n_k^2.
double windowed_g2_zero(const std::vector<IntensityMoments>& windows);

struct TriggerEmulation {
  double step = 9e6;           // Hz per frequency step
  double span = 300e6;         // laser-emitter detuning covered: [-span, span)
  double threshold = 0.35;     // contrast in the previous step
  int cutoff = 4;
  const ensemble::DetuningWeights* vibration = nullptr;
};

struct TriggeredG2 {
  std::vector<double> detuning;
  std::vector<double> contrast;
  std::vector<bool> accepted;
  double g2_zero = 0.0;
};

// Laser steps across an emitter with the cavity locked on it; a window is kept when the
// dip contrast at the previous step exceeds the threshold.
TriggeredG2 triggered_g2_zero(const SystemParams& p, const TriggerEmulation& e = {});

}  // namespace cqed::lindblad
