#include "cqed/lindblad/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "cqed/analysis/contrast.hpp"
#include "cqed/errors.hpp"
#include "cqed/lindblad/solver.hpp"
#include "cqed/parallel.hpp"

namespace cqed::lindblad {

namespace {

// Row vector w with w^T vec(X) = Tr(A X).
Vector trace_row(const Matrix& A) { return vectorize(A.transpose()); }

struct Prepared {
  Liouvillian L;
  Vector start;  // vec(a rho a^dag) / <n>
  Vector probe;  // trace functional of a^dag a
  double photons = 0.0;
};

Prepared prepare(const SystemParams& p, int cutoff) {
  const auto h = HilbertConfig::fock(cutoff);
  Prepared s{build_liouvillian(p, h), {}, {}, 0.0};
  const Matrix rho = steady_state(s.L);
  const auto ops = build_operators(h);
  const Matrix n_op = ops.a.adjoint() * ops.a;
  s.photons = expectation(rho, n_op);
  if (!(s.photons > 0.0)) throw NumericError("g2 undefined: no intracavity photons");
  s.start = vectorize(ops.a * rho * ops.a.adjoint()) / s.photons;
  s.probe = trace_row(n_op);
  return s;
}

double readout(const Prepared& s, const Vector& v) {
  return (s.probe.transpose() * v)(0).real() / s.photons;
}

std::vector<double> propagate_expm(const Prepared& s, const std::vector<double>& tau) {
  std::vector<double> out(tau.size());
  std::map<double, Matrix> cache;
  Vector v = s.start;
  double t = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double dt = tau[i] - t;
    if (dt > 0.0) {
      auto it = cache.find(dt);
      if (it == cache.end()) it = cache.emplace(dt, (s.L.matrix * dt).exp()).first;
      v = it->second * v;
      t = tau[i];
    }
    out[i] = readout(s, v);
  }
  return out;
}

std::vector<double> propagate_rk45(const Prepared& s, const std::vector<double>& tau, double rtol) {
  // Dormand-Prince 5(4)
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                          e5 = b5 - -92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;
  (void)c2, (void)c3, (void)c4, (void)c5;
  const Matrix& L = s.L.matrix;
  const double atol = rtol;
  std::vector<double> out(tau.size());
  Vector y = s.start;
  double t = 0.0;
  double h = 0.01 / L.cwiseAbs().rowwise().sum().maxCoeff();
  Vector k1 = L * y, k2, k3, k4, k5, k6, k7, y5, err;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    while (t < tau[i]) {
      const bool last = t + h >= tau[i];
      const double step = last ? tau[i] - t : h;
      k2 = L * (y + step * (a21 * k1));
      k3 = L * (y + step * (a31 * k1 + a32 * k2));
      k4 = L * (y + step * (a41 * k1 + a42 * k2 + a43 * k3));
      k5 = L * (y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      k6 = L * (y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      y5 = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = L * y5;
      err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double en = 0.0;
      for (Eigen::Index j = 0; j < y.size(); ++j) {
        const double sc = atol + rtol * std::max(std::abs(y(j)), std::abs(y5(j)));
        en = std::max(en, std::abs(err(j)) / sc);
      }
      if (en <= 1.0) {
        t = last ? tau[i] : t + step;
        y = y5;
        k1 = k7;
      }
      const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      if (!last || en > 1.0) h = step * fac;
      if (!(h > 0.0) || !std::isfinite(h)) throw NumericError("adaptive propagation failed");
    }
    out[i] = readout(s, y);
  }
  return out;
}

double g2_zero_at(const SystemParams& p, int cutoff) {
  const auto m = intensity_moments(p, HilbertConfig::fock(cutoff));
  return m.coincidence / (m.photons * m.photons);
}

}  // namespace

G2Curve g2_transmitted(const SystemParams& p, const std::vector<double>& tau, const G2Options& opt) {
  p.validate();
  if (!p.weak_drive()) throw ValidationError("g2 requires weak driving (xi / 2 pi kappa below threshold)");
  require(opt.cutoff >= 1, "photon cutoff must be >= 1");
  for (std::size_t i = 0; i < tau.size(); ++i) {
    require(tau[i] >= 0.0 && std::isfinite(tau[i]), "tau must be finite and >= 0");
    if (i > 0) require(tau[i] >= tau[i - 1], "tau grid must be non-decreasing");
  }
  int n = opt.cutoff;
  if (opt.auto_raise) {
    double prev = g2_zero_at(p, n);
    for (;;) {
      const double next = g2_zero_at(p, n + 2);
      if (std::abs(next - prev) <= opt.convergence_tol) break;
      if (n + 2 >= opt.max_cutoff) {
        std::ostringstream os;
        os << "photon cutoff not converged: g2(0) changes by " << std::abs(next - prev) << " between N=" << n
           << " and N=" << n + 2;
        throw NumericError(os.str());
      }
      n += 2;
      prev = next;
    }
  }
  const auto s = prepare(p, n);
  G2Curve out;
  out.tau = tau;
  out.cutoff = n;
  out.photons = s.photons;
  out.g2 = opt.method == Propagator::expm ? propagate_expm(s, tau) : propagate_rk45(s, tau, opt.rk_rel_tol);
  if (opt.cross_check) {
    const auto other =
        opt.method == Propagator::expm ? propagate_rk45(s, tau, opt.rk_rel_tol) : propagate_expm(s, tau);
    for (std::size_t i = 0; i < tau.size(); ++i) {
      if (!(std::abs(other[i] - out.g2[i]) <= opt.cross_check_tol)) {
        std::ostringstream os;
        os << "propagators disagree at tau = " << tau[i] << ": " << out.g2[i] << " vs " << other[i];
        throw NumericError(os.str());
      }
    }
  }
  return out;
}

IntensityMoments intensity_moments(const SystemParams& p, const HilbertConfig& h) {
  const auto o = solve_observables(p, h);
  return {o.photons, o.correlation};
}

IntensityMoments averaged_moments(const SystemParams& p, const HilbertConfig& h, const ensemble::DetuningWeights& w) {
  IntensityMoments acc;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w.weight[i] == 0.0) continue;
    SystemParams q = p;
    q.delta_c += w.detuning[i];
    const auto m = intensity_moments(q, h);
    acc.photons += w.weight[i] * m.photons;
    acc.coincidence += w.weight[i] * m.coincidence;
  }
  return acc;
}

double windowed_g2_zero(const std::vector<IntensityMoments>& windows) {
  double num = 0.0, den = 0.0;
  for (const auto& m : windows) {
    num += m.coincidence;
    den += m.photons * m.photons;
  }
  if (!(den > 0.0)) throw NumericError("no accepted photons for g2 estimate");
  return num / den;
}

TriggeredG2 triggered_g2_zero(const SystemParams& p, const TriggerEmulation& e) {
  p.validate();
  require(e.step > 0.0 && e.span > 0.0, "trigger emulation needs positive step and span");
  TriggeredG2 out;
  for (double d = -e.span; d < e.span - 1e-9 * e.step; d += e.step) out.detuning.push_back(d);
  const std::size_t n = out.detuning.size();
  std::vector<IntensityMoments> on(n), off(n);
  const auto h = HilbertConfig::fock(e.cutoff);
  parallel_for(n, [&](std::size_t k) {
    SystemParams q = p;
    q.delta_e = out.detuning[k];
    q.delta_c = out.detuning[k];
    SystemParams empty = q;
    empty.g = 0.0;
    on[k] = e.vibration ? averaged_moments(q, h, *e.vibration) : intensity_moments(q, h);
    off[k] = e.vibration ? averaged_moments(empty, h, *e.vibration) : intensity_moments(empty, h);
  });
  out.contrast.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.contrast[k] = 1.0 - on[k].photons / off[k].photons;
  out.accepted = analysis::trigger_gate(out.contrast, e.threshold);
  std::vector<IntensityMoments> kept;
  for (std::size_t k = 0; k < n; ++k)
    if (out.accepted[k]) kept.push_back(on[k]);
  out.g2_zero = windowed_g2_zero(kept);
  return out;
}

}  // namespace cqed::lindblad
