#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bore/conjugate_flow.hpp"

namespace bore {

// Phase-plane data of the long-wave (MCC) model at upstream depth lambda.
// zeta is the interface deflection; the rest points are Z- = 0 and
// Z+ = lambda_star - lambda, connected by a unique monotone heteroclinic.
struct MccState {
  FluidParameters params;
  double lambda = 0.0;
  double z_minus = 0.0;       // always 0
  double z_plus = 0.0;        // lambda_star - lambda
  double kappa_minus = 0.0;   // tail decay rate at Z- (0 when lambda == lambda_star)
  double kappa_plus = 0.0;    // tail decay rate at Z+
};

MccState make_mcc_state(const FluidParameters& params, double lambda);

// Denominator D(zeta) = (1-lambda)^2 (lambda+zeta) rho2 + lambda^2 (1-lambda-zeta) rho1.
// Positive whenever lambda + zeta lies in (0,1).
double mcc_denominator(const MccState& state, double zeta);

// kappa0 = sqrt(3 (rho1-rho2) / (2 F^2)), the amplitude-independent prefactor
// of the factored slope.
double mcc_kappa0(const FluidParameters& params);

// Squared interface slope G(zeta): the right side of the model equation
//   zeta_x^2 = (3 zeta^2 / 2F^2) *
//     [(lambda+zeta)(1-lambda-zeta+F^2) rho2 - (1-lambda-zeta)(lambda+zeta-F^2) rho1] / D(zeta).
double slope_squared(const MccState& state, double zeta);

// The same quantity through the exact factorization
//   G(zeta) = kappa0^2 zeta^2 (z_plus - zeta)^2 / D(zeta),
// which exposes the double zeros and is the form used for integration.
double slope_squared_factored(const MccState& state, double zeta);

// Signed slope along the heteroclinic, smooth between the rest points:
// zeta_x = sign(z_plus) kappa0 zeta (z_plus - zeta) / sqrt(D(zeta)).
double heteroclinic_slope(const MccState& state, double zeta);

// Potential form: V = -G/2, normalized V(0) = 0, so zeta'' + V_z = 0.
double potential(const MccState& state, double zeta);

struct PropositionReport {
  bool conjugate = false;         // V(Z-) == V(Z+) within tol
  bool hetero_nondegen = false;   // V < 0 strictly between the rest points
  bool spectral_nondegen = false; // V_zz(Z+-) < 0
  bool all() const { return conjugate && hetero_nondegen && spectral_nondegen; }
};

// Numerical check of the three heteroclinic-existence conditions.
// tol and margin act on O(1) normalized quantities; the interior condition is
// normalized by the well depth at the midpoint.
PropositionReport check_proposition_conditions(const MccState& state, double tol = 1e-10,
                                               double margin = 1e-8);

struct DecayRates {
  double kappa_minus = 0.0;
  double kappa_plus = 0.0;
};

// Linearized decay rates at the two rest points:
//   kappa-+ = kappa0 |z_plus| / sqrt(D at the rest point).
DecayRates decay_rates(const MccState& state);

// Integrates the heteroclinic through the factored first-order equation on
// the given sorted abscissae. Phase: zeta(0) = (Z- + Z+)/2 unless zeta0
// overrides it. Near the rest points the linearized exponential tail is used
// once |zeta - Z| < 1e-8 |Z+ - Z-|.
std::vector<double> heteroclinic_profile(const MccState& state, std::span<const double> x,
                                         std::optional<double> zeta0 = std::nullopt);

}  // namespace bore
