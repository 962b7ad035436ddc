#include "cqed/analysis/least_squares.hpp"

#include <cmath>

#include "cqed/errors.hpp"

namespace cqed::analysis {

namespace {

struct Linearization {
  Eigen::MatrixXd JtJ;
  Eigen::VectorXd Jtr;
  double chi2 = 0.0;
};

double chi2_of(const CurveModel& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
               const Eigen::VectorXd& w, const Eigen::VectorXd& p) {
  double c = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double r = y(i) - m.value(x(i), p);
    c += w(i) * r * r;
  }
  return c;
}

Linearization linearize(const CurveModel& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& w, const Eigen::VectorXd& p) {
  const Eigen::Index k = p.size();
  Linearization L{Eigen::MatrixXd::Zero(k, k), Eigen::VectorXd::Zero(k), 0.0};
  Eigen::VectorXd grad(k);
  Eigen::VectorXd h(k);
  for (Eigen::Index j = 0; j < k; ++j) h(j) = 1e-7 * (std::abs(p(j)) + 1.0);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double f = m.value(x(i), p);
    if (m.gradient) {
      m.gradient(x(i), p, grad);
    } else {
      Eigen::VectorXd q = p;
      for (Eigen::Index j = 0; j < k; ++j) {
        q(j) = p(j) + h(j);
        const double fp = m.value(x(i), q);
        q(j) = p(j) - h(j);
        const double fm = m.value(x(i), q);
        q(j) = p(j);
        grad(j) = (fp - fm) / (2.0 * h(j));
      }
    }
    const double r = y(i) - f;
    L.chi2 += w(i) * r * r;
    L.JtJ.noalias() += w(i) * grad * grad.transpose();
    L.Jtr.noalias() += w(i) * r * grad;
  }
  return L;
}

// Solves (A + lambda diag(A)) d = b with Jacobi scaling.
bool damped_step(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double lambda, Eigen::VectorXd& d) {
  const Eigen::Index k = A.rows();
  Eigen::VectorXd s(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!(A(j, j) > 0.0)) return false;
    s(j) = 1.0 / std::sqrt(A(j, j));
  }
  Eigen::MatrixXd As = s.asDiagonal() * A * s.asDiagonal();
  As.diagonal().array() += lambda;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(As);
  if (ldlt.info() != Eigen::Success) return false;
  d = s.asDiagonal() * ldlt.solve(s.asDiagonal() * b);
  return d.allFinite();
}

Eigen::MatrixXd scaled_inverse(const Eigen::MatrixXd& A) {
  const Eigen::Index k = A.rows();
  Eigen::VectorXd s(k);
  for (Eigen::Index j = 0; j < k; ++j) s(j) = A(j, j) > 0.0 ? 1.0 / std::sqrt(A(j, j)) : 1.0;
  const Eigen::MatrixXd As = s.asDiagonal() * A * s.asDiagonal();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(As);
  if (!lu.isInvertible()) return Eigen::MatrixXd::Constant(k, k, INFINITY);
  return s.asDiagonal() * lu.inverse() * s.asDiagonal();
}

}  // namespace

LsqResult levenberg_marquardt(const CurveModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& w, Eigen::VectorXd p, const LsqOptions& opt) {
  require(x.size() == y.size() && x.size() == w.size(), "data and weight sizes differ");
  require(x.size() > p.size(), "need more data points than parameters");
  LsqResult out;
  out.dof = static_cast<int>(x.size() - p.size());
  double lambda = opt.initial_lambda;
  auto lin = linearize(model, x, y, w, p);
  if (!std::isfinite(lin.chi2)) {
    out.parameters = p;
    out.message = "model not finite at the initial guess";
    return out;
  }
  Eigen::VectorXd d;
  for (int it = 0; it < opt.max_iterations; ++it) {
    out.iterations = it + 1;
    if (!damped_step(lin.JtJ, lin.Jtr, lambda, d)) {
      out.message = "singular normal equations";
      break;
    }
    const Eigen::VectorXd trial = p + d;
    const double c = chi2_of(model, x, y, w, trial);
    if (std::isfinite(c) && c <= lin.chi2) {
      double rel = 0.0;
      for (Eigen::Index j = 0; j < p.size(); ++j) {
        const double scale = std::max(std::abs(trial(j)), 1.0 / std::sqrt(lin.JtJ(j, j)));
        rel = std::max(rel, std::abs(d(j)) / scale);
      }
      p = trial;
      lin = linearize(model, x, y, w, p);
      lambda = std::max(lambda / 10.0, 1e-15);
      if (rel < opt.step_tolerance) {
        out.converged = true;
        out.message = "relative step below tolerance";
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e15) {
        // No further decrease possible: accept if the undamped step predicts only rounding-level gain.
        Eigen::VectorXd gn;
        const bool ok = damped_step(lin.JtJ, lin.Jtr, 0.0, gn);
        const double gain = ok ? gn.dot(lin.Jtr) : INFINITY;
        out.converged = gain <= 1e-10 * (lin.chi2 + 1.0);
        out.message = out.converged ? "chi2 stationary" : "damping exhausted";
        break;
      }
    }
  }
  if (out.message.empty()) out.message = "iteration limit reached";
  out.parameters = p;
  out.chi2 = lin.chi2;
  out.covariance = scaled_inverse(lin.JtJ);
  return out;
}

}  // namespace cqed::analysis
