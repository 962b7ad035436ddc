#pragma once

#include <cmath>
#include <numbers>

#include "cqed/measured.hpp"

namespace cqed::ensemble {

// Which linewidth enters C = 4 g^2 / (kappa * linewidth).
enum class CooperativityDenominator { natural, broadened };

// C = tau / tau_P - 1 with linear error propagation.
Measured cooperativity_from_lifetimes(Measured tau, Measured tau_p);

// C = (gamma'_P - gamma') / gamma / correction.
Measured cooperativity_from_linewidths(Measured gamma_p_broadened, Measured gamma_broadened, Measured gamma,
                                       double correction = 0.90);

// C_coh = (gamma'_P / gamma' - 1) / correction.
Measured coherent_cooperativity(Measured gamma_p_broadened, Measured gamma_broadened, double correction = 0.90);

// C for a given g; `linewidth` is gamma or gamma' according to the convention in use.
double cooperativity_from_g(double g, double kappa, double linewidth);
double g_from_cooperativity(double c, double kappa, double linewidth);
Measured g_from_cooperativity(Measured c, double kappa, double linewidth);

double linewidth_for(CooperativityDenominator d, double gamma, double gamma_broadened);

// tau / (1 + C).
double purcell_lifetime(double tau, double c);
Measured purcell_lifetime(Measured tau, Measured c);

inline const double zeta_100 = std::pow(std::cos(35.0 * std::numbers::pi / 180.0), 2);

// alpha * eta >= C / (F_P beta0 zeta eps_max).
Measured alpha_eta_bound(Measured c, double purcell, double beta0, double zeta = zeta_100, double eps_max = 1.0);
// Same bound with the Debye-Waller factor uncertainty folded in.
Measured alpha_eta_bound(Measured c, double purcell, Measured beta0, double zeta = zeta_100, double eps_max = 1.0);

}  // namespace cqed::ensemble
