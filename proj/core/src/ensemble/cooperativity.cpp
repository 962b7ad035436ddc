#include "cqed/ensemble/cooperativity.hpp"

#include "cqed/errors.hpp"

namespace cqed::ensemble {

Measured cooperativity_from_lifetimes(Measured tau, Measured tau_p) {
  require(tau_p.value > 0.0, "Purcell lifetime must be > 0");
  require(tau_p.value <= tau.value, "Purcell lifetime must not exceed the natural lifetime");
  const double c = tau.value / tau_p.value - 1.0;
  const double d_tau = 1.0 / tau_p.value;
  const double d_taup = -tau.value / (tau_p.value * tau_p.value);
  return {c, std::hypot(d_tau * tau.sigma, d_taup * tau_p.sigma)};
}

Measured cooperativity_from_linewidths(Measured gp, Measured gb, Measured g, double correction) {
  require(g.value > 0.0, "natural linewidth must be > 0");
  require(gb.value >= g.value, "broadened linewidth must be >= natural linewidth");
  require(gp.value >= gb.value, "Purcell-broadened linewidth must be >= broadened linewidth");
  require(correction > 0.0, "overlap correction must be > 0");
  const double k = 1.0 / (g.value * correction);
  const double c = (gp.value - gb.value) * k;
  const double s = std::sqrt(std::pow(k * gp.sigma, 2) + std::pow(k * gb.sigma, 2) + std::pow(c / g.value * g.sigma, 2));
  return {c, s};
}

Measured coherent_cooperativity(Measured gp, Measured gb, double correction) {
  require(gb.value > 0.0, "broadened linewidth must be > 0");
  require(gp.value >= gb.value, "Purcell-broadened linewidth must be >= broadened linewidth");
  require(correction > 0.0, "overlap correction must be > 0");
  const double c = (gp.value / gb.value - 1.0) / correction;
  const double d_gp = 1.0 / (gb.value * correction);
  const double d_gb = -gp.value / (gb.value * gb.value * correction);
  return {c, std::hypot(d_gp * gp.sigma, d_gb * gb.sigma)};
}

double cooperativity_from_g(double g, double kappa, double linewidth) {
  require(kappa > 0.0 && linewidth > 0.0 && g >= 0.0, "cooperativity inputs must be positive");
  return 4.0 * g * g / (kappa * linewidth);
}

double g_from_cooperativity(double c, double kappa, double linewidth) {
  require(c >= 0.0 && kappa > 0.0 && linewidth > 0.0, "inputs must be positive");
  return std::sqrt(c * kappa * linewidth / 4.0);
}

Measured g_from_cooperativity(Measured c, double kappa, double linewidth) {
  const double g = g_from_cooperativity(c.value, kappa, linewidth);
  return {g, c.value > 0.0 ? g * c.sigma / (2.0 * c.value) : 0.0};
}

double linewidth_for(CooperativityDenominator d, double gamma, double gamma_broadened) {
  return d == CooperativityDenominator::natural ? gamma : gamma_broadened;
}

double purcell_lifetime(double tau, double c) {
  require(tau > 0.0 && c >= 0.0, "tau must be > 0 and C >= 0");
  return tau / (1.0 + c);
}

Measured purcell_lifetime(Measured tau, Measured c) {
  const double v = purcell_lifetime(tau.value, c.value);
  const double d_tau = 1.0 / (1.0 + c.value);
  const double d_c = -tau.value / std::pow(1.0 + c.value, 2);
  return {v, std::hypot(d_tau * tau.sigma, d_c * c.sigma)};
}

Measured alpha_eta_bound(Measured c, double purcell, double beta0, double zeta, double eps_max) {
  require(c.value >= 0.0 && purcell > 0.0, "C must be >= 0 and F_P > 0");
  require(beta0 > 0.0 && beta0 <= 1.0 && zeta > 0.0 && zeta <= 1.0 && eps_max > 0.0 && eps_max <= 1.0,
          "beta0, zeta and eps_max must lie in (0, 1]");
  const double k = 1.0 / (purcell * beta0 * zeta * eps_max);
  return {c.value * k, c.sigma * k};
}

Measured alpha_eta_bound(Measured c, double purcell, Measured beta0, double zeta, double eps_max) {
  const auto b = alpha_eta_bound(c, purcell, beta0.value, zeta, eps_max);
  return {b.value, std::hypot(b.sigma, b.value * beta0.sigma / beta0.value)};
}

}  // namespace cqed::ensemble
