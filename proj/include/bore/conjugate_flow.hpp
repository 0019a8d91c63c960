#pragma once

#include "bore/errors.hpp"

namespace bore {

// Two-layer stratification with the derived critical constants.
//
// Units: channel height 1, upstream relative speed 1. Gravity enters only
// through 1/F^2. The lower fluid is heavier: rho1 > rho2 > 0.
struct FluidParameters {
  double rho1 = 0.0;         // lower-layer density
  double rho2 = 0.0;         // upper-layer density
  double froude_sq = 0.0;    // F^2 = (sqrt(rho1)-sqrt(rho2))/(sqrt(rho1)+sqrt(rho2))
  double lambda_star = 0.0;  // conjugate lower-layer depth, in (1/2, 1)

  // jump(rho) = rho2 - rho1 < 0, the convention used by the dynamic condition.
  double density_jump() const { return rho2 - rho1; }
};

FluidParameters make_parameters(double rho1, double rho2);

// An x-independent (laminar) two-layer flow with lower depth d1 and the
// layer speeds fixed by mass conservation against the upstream state of
// parameter lambda. Slopes are the height-function derivatives h_p per
// layer; speed = 1/slope.
struct LaminarState {
  double lower_depth = 0.0;  // d1 in (0,1); interface sits at y = d1 - lambda
  double lower_slope = 0.0;  // d1/lambda
  double upper_slope = 0.0;  // (1-d1)/(1-lambda)
  double lower_speed = 0.0;  // lambda/d1
  double upper_speed = 0.0;  // (1-lambda)/(1-d1)

  // Mass flux carried by each layer. Fixed by construction, so these are
  // conserved exactly, not merely to rounding.
  double lower_flux(double lambda) const { return lambda; }
  double upper_flux(double lambda) const { return 1.0 - lambda; }
};

// Builds the mass-flux-consistent laminar state of lower depth d1.
LaminarState laminar_state(const FluidParameters& params, double lambda, double d1);

// Upstream state (d1 = lambda, unit speeds) and its conjugate downstream
// state (d1 = lambda_star).
LaminarState upstream_state(const FluidParameters& params, double lambda);
LaminarState downstream_state(const FluidParameters& params, double lambda);

// Residual of the dynamic (pressure-jump) interface condition at a laminar
// state: 1/2*jump(rho*speed^2) + jump(rho)/F^2*(d1-lambda) - jump(rho)/2.
// Zero exactly at d1 = lambda and at d1 = lambda_star.
double dynamic_condition_residual(const FluidParameters& params, double lambda,
                                  double d1, double lower_speed, double upper_speed);

// Steady horizontal momentum flux S = sum_i int (p_i + rho_i u_i^2) dy across
// the channel section. Pressure is reconstructed from the per-layer Bernoulli
// relation p_i = B_i - rho_i u_i^2/2 - rho_i y/F^2 with the constants B_i
// anchored at the upstream state (interface pressure 0 there), so upstream and
// conjugate downstream values agree identically.
double flow_force(const FluidParameters& params, double lambda, double d1,
                  double lower_speed, double upper_speed);

// Quadratic numerator of the long-wave model written in the total lower depth
// h1: N(h1) = (rho1-rho2)h1^2 - (rho1-rho2)(1+F^2)h1 + F^2 rho1. Its
// discriminant vanishes and the double root is lambda_star.
double depth_quadratic(const FluidParameters& params, double h1);
double depth_quadratic_discriminant(const FluidParameters& params);

}  // namespace bore
