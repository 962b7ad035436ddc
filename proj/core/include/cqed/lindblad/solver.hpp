#pragma once

#include <vector>

#include "cqed/ensemble/vibration.hpp"
#include "cqed/lindblad/system.hpp"

namespace cqed::lindblad {

// Density matrix solving L(rho) = 0, Tr rho = 1. Throws NumericError when the
// Liouvillian has more than the trace degeneracy or the residual check fails.
Matrix steady_state(const Liouvillian& L);

double residual_norm(const Liouvillian& L, const Matrix& rho);  // ||L vec(rho)|| / ||L||_F

double expectation(const Matrix& rho, const Matrix& op);

struct SteadyObservables {
  double photons = 0.0;        // <a^dag a>
  double excited = 0.0;        // <sigma^dag sigma>
  double correlation = 0.0;    // <a^dag a^dag a a>
  std::complex<double> field;  // <a>
};

SteadyObservables observables(const Matrix& rho, const HilbertConfig& hilbert);
SteadyObservables solve_observables(const SystemParams& p, const HilbertConfig& hilbert);

// (2 pi kappa_in)(2 pi kappa_out) <a^dag a> / xi^2.
double transmission(const Matrix& rho, const SystemParams& p, const HilbertConfig& hilbert);
double transmission(const SystemParams& p, const HilbertConfig& hilbert = HilbertConfig::fock(2));

double empty_transmission_max(const SystemParams& p);  // 4 kappa_in kappa_out / kappa^2

// Transmission averaged over cavity-detuning jitter.
double averaged_transmission(const SystemParams& p, const HilbertConfig& hilbert,
                             const ensemble::DetuningWeights& w);

struct Spectrum {
  std::vector<double> probe_detuning;  // nu_probe - nu_reference, Hz
  std::vector<double> transmission;
  std::vector<double> normalized;      // transmission / empty-cavity maximum
};

// Each probe detuning d shifts both Delta_e and Delta_c by -d relative to `p`.
Spectrum transmission_spectrum(const SystemParams& p, const std::vector<double>& probe_detuning,
                               const HilbertConfig& hilbert = HilbertConfig::fock(2),
                               const ensemble::DetuningWeights* vibration = nullptr);

struct SaturationOptions {
  int cutoff = 8;
  bool auto_raise = true;
  int max_cutoff = 30;
  double tolerance = 1e-3;                          // contrast change between N and N+2
  double purcell_lifetime = 5e-9 / 2.7;             // s
  const ensemble::DetuningWeights* vibration = nullptr;
};

struct SaturationPoint {
  double photons_per_lifetime = 0.0;  // empty-cavity transmitted photons per Purcell lifetime
  double xi = 0.0;
  double t_on = 0.0;
  double t_off = 0.0;
  double contrast = 0.0;
  int cutoff = 0;
};

// Drive amplitude whose empty-cavity resonant output delivers x photons per lifetime.
double drive_for_photons_per_lifetime(const SystemParams& p, double x, double lifetime);

std::vector<SaturationPoint> saturation_curve(const SystemParams& p, const std::vector<double>& photons_per_lifetime,
                                              const SaturationOptions& opt = {});

}  // namespace cqed::lindblad
