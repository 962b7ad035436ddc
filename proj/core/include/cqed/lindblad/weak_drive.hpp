#pragma once

#include <complex>

#include "cqed/lindblad/system.hpp"

namespace cqed::lindblad {

struct WeakDriveResult {
  std::complex<double> amplitude;  // <a>, first order in xi
  std::complex<double> emitter;    // <sigma>, first order in xi
  double coherent_photons = 0.0;   // |<a>|^2
  double photons = 0.0;            // <a^dag a> including incoherent scattering, second order
  double excited = 0.0;            // <sigma^dag sigma>, second order
  double transmission = 0.0;       // from `photons`
  double coherent_transmission = 0.0;
};

// Closed-form linear response plus the closed second-order moment equations.
// Throws ValidationError when xi / (2 pi kappa) exceeds the weak-drive threshold.
WeakDriveResult weak_drive_analytic(const SystemParams& p);

}  // namespace cqed::lindblad
