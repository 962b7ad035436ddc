#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cqed/analysis/fitters.hpp"
#include "cqed/analysis/postselect.hpp"
#include "cqed/io/config.hpp"
#include "cqed/lindblad/system.hpp"
#include "cqed/measured.hpp"

namespace cqed::pipeline {

struct Recovered {
  std::string name;
  double truth = 0.0;      // value the closure is judged against
  double reference = 0.0;  // published value for comparison
  double estimate = 0.0;
  double sigma = 0.0;
  bool fit_ok = false;

  double pull() const { return sigma > 0.0 ? (estimate - truth) / sigma : 0.0; }
  bool within(double n_sigma) const { return fit_ok && sigma > 0.0 && std::abs(estimate - truth) <= n_sigma * sigma; }
};

struct ClosureRun {
  std::vector<Recovered> quantities;  // purcell_lifetime, natural_lifetime, linewidth, purcell_linewidth, cavity_linewidth
  analysis::PostselectResult ple_on;
  analysis::PostselectResult ple_off;
  analysis::FitResult purcell_fit;
  analysis::FitResult natural_fit;
  analysis::FitResult cavity_fit;
  analysis::HistogramTrace purcell_histogram;
  analysis::HistogramTrace natural_histogram;
  analysis::ScanTrace cavity_trace;
  std::vector<analysis::PleScan> ple_on_scans;
  std::vector<analysis::PleScan> ple_off_scans;

  const Recovered& at(const std::string& name) const;
};

// Independent 64-bit seed for one stage of one replication.
std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t replication, std::uint32_t stage);

// FWHM of the excited-state population when the laser scans across the emitter at
// emitter-cavity detuning `cavity_offset` (weak drive).
double emitter_linewidth(const lindblad::SystemParams& p, double cavity_offset);

// Coupling at which emitter_linewidth on cavity resonance equals `purcell_linewidth`.
// To first order this is gamma'_P = gamma' + 4 g^2 / kappa; the exact root is found by bisection.
double coupling_for_purcell_linewidth(const lindblad::SystemParams& p, double purcell_linewidth);

// Generates every synthetic data set of one replication and runs the estimators on it.
// Truths are scaled by (1 + scan.perturbation) for generation only.
ClosureRun run_closure(const io::RunConfig& cfg, std::uint64_t seed, std::uint64_t replication = 0);

struct Figures {
  Measured c_lifetimes;
  Measured c_linewidths;
  Measured c_coherent;
  Measured purcell_lifetime;  // tau / (1 + C_linewidths)
  Measured g;
  Measured alpha_eta;
  double overlap_ratio = 0.0;  // computed from the vibration spec
};

Figures figures_of_merit(const io::RunConfig& cfg, Measured tau, Measured tau_p, Measured linewidth,
                         Measured purcell_linewidth);

}  // namespace cqed::pipeline
