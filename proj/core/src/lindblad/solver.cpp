#include "cqed/lindblad/solver.hpp"

#include <cmath>
#include <sstream>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"
#include "cqed/parallel.hpp"

namespace cqed::lindblad {

using constants::two_pi;

Matrix steady_state(const Liouvillian& L) {
  const int d = L.dim;
  const Eigen::Index D = static_cast<Eigen::Index>(d) * d;
  const double scale = L.matrix.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw NumericError("steady state undefined for a vanishing Liouvillian");
  Matrix M = L.matrix / scale;
  M.row(0).setZero();
  for (int i = 0; i < d; ++i) M(0, static_cast<Eigen::Index>(i) * d + i) = 1.0;
  Vector b = Vector::Zero(D);
  b(0) = 1.0;
  Eigen::PartialPivLU<Matrix> lu(M);
  const double rc = lu.rcond();
  if (!(rc > 1e-13)) {
    std::ostringstream os;
    os << "Liouvillian is rank deficient beyond the trace degeneracy (rcond = " << rc << ")";
    throw NumericError(os.str());
  }
  Matrix rho = unvectorize(lu.solve(b), d);
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (!(herm <= 1e-10)) throw NumericError("steady state is not Hermitian");
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double res = residual_norm(L, rho);
  if (!(res <= 1e-9)) {
    std::ostringstream os;
    os << "steady-state residual " << res << " exceeds 1e-9 relative";
    throw NumericError(os.str());
  }
  return rho;
}

double residual_norm(const Liouvillian& L, const Matrix& rho) {
  const double n = L.matrix.norm();
  if (n == 0.0) return 0.0;
  return (L.matrix * vectorize(rho)).norm() / n;
}

double expectation(const Matrix& rho, const Matrix& op) { return (op * rho).trace().real(); }

SteadyObservables observables(const Matrix& rho, const HilbertConfig& hilbert) {
  const auto ops = build_operators(hilbert);
  const Matrix ad = ops.a.adjoint();
  SteadyObservables o;
  o.photons = expectation(rho, ad * ops.a);
  o.excited = expectation(rho, ops.sigma.adjoint() * ops.sigma);
  o.correlation = expectation(rho, ad * ad * ops.a * ops.a);
  o.field = (ops.a * rho).trace();
  return o;
}

SteadyObservables solve_observables(const SystemParams& p, const HilbertConfig& hilbert) {
  return observables(steady_state(build_liouvillian(p, hilbert)), hilbert);
}

double empty_transmission_max(const SystemParams& p) {
  require(p.kappa > 0.0, "kappa must be > 0");
  return 4.0 * p.kappa_in * p.kappa_out / (p.kappa * p.kappa);
}

double transmission(const Matrix& rho, const SystemParams& p, const HilbertConfig& hilbert) {
  if (!(p.xi > 0.0)) throw ValidationError("transmission is undefined for zero drive");
  const auto ops = build_operators(hilbert);
  const double n = expectation(rho, ops.a.adjoint() * ops.a);
  return two_pi * p.kappa_in * two_pi * p.kappa_out * n / (p.xi * p.xi);
}

double transmission(const SystemParams& p, const HilbertConfig& hilbert) {
  if (!(p.xi > 0.0)) throw ValidationError("transmission is undefined for zero drive");
  return transmission(steady_state(build_liouvillian(p, hilbert)), p, hilbert);
}

double averaged_transmission(const SystemParams& p, const HilbertConfig& hilbert,
                             const ensemble::DetuningWeights& w) {
  return ensemble::vibration_average(
      [&](double x) {
        SystemParams q = p;
        q.delta_c += x;
        return transmission(q, hilbert);
      },
      w);
}

Spectrum transmission_spectrum(const SystemParams& p, const std::vector<double>& probe,
                               const HilbertConfig& hilbert, const ensemble::DetuningWeights* vibration) {
  p.validate();
  for (std::size_t i = 1; i < probe.size(); ++i)
    require(probe[i] > probe[i - 1], "probe detuning grid must be strictly increasing");
  Spectrum s;
  s.probe_detuning = probe;
  s.transmission.resize(probe.size());
  s.normalized.resize(probe.size());
  const double tmax = empty_transmission_max(p);
  parallel_for(probe.size(), [&](std::size_t i) {
    SystemParams q = p;
    q.delta_e -= probe[i];
    q.delta_c -= probe[i];
    s.transmission[i] = vibration ? averaged_transmission(q, hilbert, *vibration) : transmission(q, hilbert);
    s.normalized[i] = s.transmission[i] / tmax;
  });
  return s;
}

double drive_for_photons_per_lifetime(const SystemParams& p, double x, double lifetime) {
  require(x > 0.0 && lifetime > 0.0, "photons per lifetime and lifetime must be > 0");
  const double flux_out = x / lifetime;
  const double flux_in = flux_out / empty_transmission_max(p);
  return drive_for_input_flux(flux_in, p.kappa_in);
}

namespace {

struct OnOff {
  double on, off;
};

OnOff on_off(const SystemParams& p, int cutoff, const ensemble::DetuningWeights* w) {
  const auto h = HilbertConfig::fock(cutoff);
  SystemParams empty = p;
  empty.g = 0.0;
  if (w) return {averaged_transmission(p, h, *w), averaged_transmission(empty, h, *w)};
  return {transmission(p, h), transmission(empty, h)};
}

}  // namespace

std::vector<SaturationPoint> saturation_curve(const SystemParams& p, const std::vector<double>& x,
                                              const SaturationOptions& opt) {
  p.validate();
  require(opt.cutoff >= 1 && opt.max_cutoff >= opt.cutoff, "invalid cutoff settings");
  for (double v : x) require(v > 0.0, "drive strengths must be > 0");
  std::vector<SaturationPoint> out(x.size());
  // Cutoff selection on the unaveraged resonant contrast.
  parallel_for(x.size(), [&](std::size_t i) {
    SystemParams q = p;
    q.xi = drive_for_photons_per_lifetime(p, x[i], opt.purcell_lifetime);
    int n = opt.cutoff;
    if (opt.auto_raise) {
      auto contrast = [&](int c) {
        const auto r = on_off(q, c, nullptr);
        return 1.0 - r.on / r.off;
      };
      double prev = contrast(n);
      for (;;) {
        if (n + 2 > opt.max_cutoff) {
          std::ostringstream os;
          os << "photon cutoff not converged up to " << opt.max_cutoff << " at " << x[i] << " photons per lifetime";
          throw NumericError(os.str());
        }
        const double next = contrast(n + 2);
        if (std::abs(next - prev) <= opt.tolerance) break;
        n += 2;
        prev = next;
      }
    }
    const auto r = on_off(q, n, opt.vibration);
    out[i] = {x[i], q.xi, r.on, r.off, 1.0 - r.on / r.off, n};
  });
  return out;
}

}  // namespace cqed::lindblad
