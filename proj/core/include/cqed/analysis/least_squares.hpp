#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace cqed::analysis {

// y(x; p) and optionally its gradient with respect to p.
struct CurveModel {
  std::function<double(double, const Eigen::VectorXd&)> value;
  std::function<void(double, const Eigen::VectorXd&, Eigen::Ref<Eigen::VectorXd>)> gradient;  // may be empty
};

struct LsqOptions {
  int max_iterations = 500;
  double step_tolerance = 1e-10;  // relative parameter step
  double initial_lambda = 1e-3;
};

struct LsqResult {
  Eigen::VectorXd parameters;
  Eigen::MatrixXd covariance;  // (J^T W J)^-1, unscaled
  double chi2 = 0.0;
  int dof = 0;
  int iterations = 0;
  bool converged = false;
  std::string message;
};

// Levenberg-Marquardt on sum_i w_i (y_i - f(x_i; p))^2.
LsqResult levenberg_marquardt(const CurveModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& weights, Eigen::VectorXd p0, const LsqOptions& opt = {});

}  // namespace cqed::analysis
