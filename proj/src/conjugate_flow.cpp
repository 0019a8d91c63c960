#include "bore/conjugate_flow.hpp"

#include <cmath>
#include <string>

namespace bore {

FluidParameters make_parameters(double rho1, double rho2) {
  if (!std::isfinite(rho1) || !std::isfinite(rho2) || rho1 <= 0.0 || rho2 <= 0.0) {
    throw InvalidParameterError("densities must be finite and positive, got rho1=" +
                                std::to_string(rho1) + " rho2=" + std::to_string(rho2));
  }
  if (rho1 == rho2) {
    throw DegenerateStratificationError(
        "rho1 == rho2: zero density jump leaves the dynamic condition ill-posed (F^2 = 0)");
  }
  if (rho1 < rho2) {
    throw InvalidParameterError("rho1 must exceed rho2 (heavier fluid below)");
  }
  const double a = std::sqrt(rho1);
  const double b = std::sqrt(rho2);
  FluidParameters p;
  p.rho1 = rho1;
  p.rho2 = rho2;
  p.froude_sq = (a - b) / (a + b);
  p.lambda_star = a / (a + b);
  return p;
}

LaminarState laminar_state(const FluidParameters& params, double lambda, double d1) {
  (void)params;
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw InvalidParameterError("lambda must lie in (0,1)");
  }
  if (!(d1 > 0.0 && d1 < 1.0)) {
    throw InvalidStateError("laminar lower depth must lie in (0,1), got " + std::to_string(d1));
  }
  LaminarState s;
  s.lower_depth = d1;
  s.lower_slope = d1 / lambda;
  s.upper_slope = (1.0 - d1) / (1.0 - lambda);
  s.lower_speed = lambda / d1;
  s.upper_speed = (1.0 - lambda) / (1.0 - d1);
  return s;
}

LaminarState upstream_state(const FluidParameters& params, double lambda) {
  LaminarState s = laminar_state(params, lambda, lambda);
  // exact unit speeds and slopes, independent of rounding in the divisions
  s.lower_slope = 1.0;
  s.upper_slope = 1.0;
  s.lower_speed = 1.0;
  s.upper_speed = 1.0;
  return s;
}

LaminarState downstream_state(const FluidParameters& params, double lambda) {
  return laminar_state(params, lambda, params.lambda_star);
}

double dynamic_condition_residual(const FluidParameters& params, double lambda,
                                  double d1, double lower_speed, double upper_speed) {
  if (!(d1 > 0.0 && d1 < 1.0)) {
    throw InvalidStateError("d1 outside (0,1)");
  }
  if (!std::isfinite(lower_speed) || !std::isfinite(upper_speed)) {
    throw InvalidParameterError("speeds must be finite");
  }
  const double jr = params.density_jump();
  const double jump_rho_u2 = params.rho2 * upper_speed * upper_speed -
                             params.rho1 * lower_speed * lower_speed;
  return 0.5 * jump_rho_u2 + jr / params.froude_sq * (d1 - lambda) - 0.5 * jr;
}

double flow_force(const FluidParameters& params, double lambda, double d1,
                  double lower_speed, double upper_speed) {
  if (!(d1 > 0.0 && d1 < 1.0)) {
    throw InvalidStateError("flow_force: lower depth outside (0,1)");
  }
  const double r1 = params.rho1;
  const double r2 = params.rho2;
  const double F2 = params.froude_sq;
  const double ys = d1 - lambda;  // interface height
  const double yb = -lambda;      // bottom
  const double yt = 1.0 - lambda; // top
  // p_i + rho_i u_i^2 = B_i + rho_i u_i^2/2 - rho_i y/F^2 with B_i = rho_i/2.
  const double lower = (0.5 * r1 + 0.5 * r1 * lower_speed * lower_speed) * (ys - yb) -
                       0.5 * r1 / F2 * (ys * ys - yb * yb);
  const double upper = (0.5 * r2 + 0.5 * r2 * upper_speed * upper_speed) * (yt - ys) -
                       0.5 * r2 / F2 * (yt * yt - ys * ys);
  return lower + upper;
}

double depth_quadratic(const FluidParameters& params, double h1) {
  const double dr = params.rho1 - params.rho2;
  return dr * h1 * h1 - dr * (1.0 + params.froude_sq) * h1 + params.froude_sq * params.rho1;
}

double depth_quadratic_discriminant(const FluidParameters& params) {
  const double dr = params.rho1 - params.rho2;
  const double b = dr * (1.0 + params.froude_sq);
  return b * b - 4.0 * dr * params.froude_sq * params.rho1;
}

}  // namespace bore
