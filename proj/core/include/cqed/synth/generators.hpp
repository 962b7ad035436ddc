#pragma once

#include <cstdint>
#include <vector>

#include "cqed/analysis/postselect.hpp"
#include "cqed/analysis/traces.hpp"
#include "cqed/ensemble/vibration.hpp"
#include "cqed/lindblad/system.hpp"

namespace cqed::synth {

struct EmitterTruth {
  double center = 558.5e9;          // Hz on the scan axis
  double linewidth = 77.6e6;        // gamma + gamma_dp, Hz
  double diffusion_sigma = 0.0;     // Hz, per-scan jitter of the center
  double ionization_prob = 0.0;     // per scan
  double repump_success_prob = 1.0;
  bool conditional_repump = true;   // repump before scan k+1 when scan k stayed dark

  void validate() const;
};

struct NoiseSpec {
  double peak_rate = 0.0;        // counts/s at the line maximum (or empty-cavity maximum)
  double background_rate = 0.0;  // counts/s
  double integration_time = 50e-3;
  bool poisson = true;           // false returns the expected counts

  void validate() const;
};

struct ScanGrid {
  double start = 558.0e9;
  double stop = 559.0e9;
  int points = 201;

  std::vector<double> frequencies() const;
};

enum class TransmissionModel { weak_drive, full };

struct TransmissionScanSpec {
  ScanGrid grid;
  NoiseSpec noise;
  double cavity_offset = 0.0;  // nu_c - nu_e, Hz
  TransmissionModel model = TransmissionModel::weak_drive;
  int cutoff = 2;              // Fock cutoff for the full model
  const ensemble::DetuningWeights* vibration = nullptr;
};

// Charge-state history of a scan sequence.
struct ChargeHistory {
  std::vector<bool> dark;           // emitter ionized during scan k
  std::vector<bool> repump_applied; // repump preceded scan k
  std::vector<double> center;       // emitter frequency of scan k
};

ChargeHistory simulate_charge(const EmitterTruth& truth, std::size_t scans, std::uint64_t seed);

// Transmission (dip) scan k of a sequence. System detunings are recomputed for every
// probe frequency from the emitter center and `cavity_offset`.
analysis::ScanTrace gen_transmission_scan(const EmitterTruth& truth, const lindblad::SystemParams& system,
                                          const TransmissionScanSpec& spec, std::uint64_t seed,
                                          std::size_t scan_index = 0);
std::vector<analysis::ScanTrace> gen_transmission_series(const EmitterTruth& truth,
                                                         const lindblad::SystemParams& system,
                                                         const TransmissionScanSpec& spec, std::uint64_t seed,
                                                         std::size_t scans);

struct PleScanSpec {
  ScanGrid grid;
  NoiseSpec psb;
  NoiseSpec zpl;                  // used when on resonance
  bool on_resonance = false;
  double off_resonance_detuning = 150e9;  // cavity-emitter detuning when off resonance
};

// Phonon-sideband fluorescence, proportional to the excited-state population and
// normalized at its peak; on resonance a simultaneous transmission trace is added.
std::vector<analysis::PleScan> gen_ple_series(const EmitterTruth& truth, const lindblad::SystemParams& system,
                                              const PleScanSpec& spec, std::uint64_t seed, std::size_t scans);
analysis::PleScan gen_ple_scan(const EmitterTruth& truth, const lindblad::SystemParams& system,
                               const PleScanSpec& spec, std::uint64_t seed, std::size_t scan_index = 0);

struct HistogramSpec {
  int bins = 200;
  double bin_width = 0.25e-9;
  double excitation_time = 2e-9;  // start of the decay
  double amplitude = 1000.0;      // signal counts per bin at the excitation time
  double fast_amplitude = 0.0;    // counts per bin
  double fast_decay = 0.3e-9;
  double background = 0.0;        // counts per bin
  bool poisson = true;
};

analysis::HistogramTrace gen_lifetime_histogram(double tau, const HistogramSpec& spec, std::uint64_t seed,
                                                std::size_t stream = 0);

struct EmitterLine {
  double frequency = 0.0;  // Hz
  double strength = 1.0;
  double linewidth = 0.0;  // Hz
};

struct PlMapSpec {
  std::vector<double> gaps;               // m
  std::vector<double> cavity_frequency;   // Hz, resonance at each gap
  std::vector<double> frequencies;        // detection axis, Hz
  double kappa = 6.86e9;
  double scale = 1.0;                     // counts per unit intensity
  double background = 0.0;                // counts per pixel
  bool poisson = true;
};

struct PlMap {
  std::vector<double> gaps;
  std::vector<double> frequencies;
  std::vector<std::vector<double>> intensity;  // [gap][frequency]
};

PlMap gen_pl_map(const std::vector<EmitterLine>& lines, const PlMapSpec& spec, std::uint64_t seed);

}  // namespace cqed::synth
