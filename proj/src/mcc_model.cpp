#include "bore/mcc_model.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <string>

namespace bore {

namespace {

void require_in_channel(const MccState& state, double zeta) {
  const double depth = state.lambda + zeta;
  if (!(depth > 0.0 && depth < 1.0)) {
    throw OutOfChannelError("lambda + zeta = " + std::to_string(depth) +
                            " leaves the channel (0,1)");
  }
}

void require_distinct_rest_points(const MccState& state) {
  if (state.z_plus == 0.0) {
    throw DegenerateRestPointError("lambda == lambda_star: rest points coincide");
  }
}

}  // namespace

MccState make_mcc_state(const FluidParameters& params, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw InvalidParameterError("lambda must lie in (0,1)");
  }
  MccState s;
  s.params = params;
  s.lambda = lambda;
  s.z_minus = 0.0;
  s.z_plus = params.lambda_star - lambda;
  if (s.z_plus != 0.0) {
    const double k0 = mcc_kappa0(params);
    s.kappa_minus = k0 * std::abs(s.z_plus) / std::sqrt(mcc_denominator(s, 0.0));
    s.kappa_plus = k0 * std::abs(s.z_plus) / std::sqrt(mcc_denominator(s, s.z_plus));
  }
  return s;
}

double mcc_denominator(const MccState& state, double zeta) {
  const double lam = state.lambda;
  const double om = 1.0 - lam;
  return om * om * (lam + zeta) * state.params.rho2 +
         lam * lam * (om - zeta) * state.params.rho1;
}

double mcc_kappa0(const FluidParameters& params) {
  return std::sqrt(3.0 * (params.rho1 - params.rho2) / (2.0 * params.froude_sq));
}

double slope_squared(const MccState& state, double zeta) {
  require_in_channel(state, zeta);
  const double lam = state.lambda;
  const double F2 = state.params.froude_sq;
  const double a = lam + zeta;        // total lower depth
  const double b = 1.0 - lam - zeta;  // total upper depth
  const double bracket = a * (b + F2) * state.params.rho2 - b * (a - F2) * state.params.rho1;
  return 3.0 * zeta * zeta / (2.0 * F2) * bracket / mcc_denominator(state, zeta);
}

double slope_squared_factored(const MccState& state, double zeta) {
  require_in_channel(state, zeta);
  const double k0 = mcc_kappa0(state.params);
  const double w = state.z_plus - zeta;
  return k0 * k0 * zeta * zeta * w * w / mcc_denominator(state, zeta);
}

double heteroclinic_slope(const MccState& state, double zeta) {
  require_in_channel(state, zeta);
  const double sgn = state.z_plus >= 0.0 ? 1.0 : -1.0;
  return sgn * mcc_kappa0(state.params) * zeta * (state.z_plus - zeta) /
         std::sqrt(mcc_denominator(state, zeta));
}

double potential(const MccState& state, double zeta) {
  return -0.5 * slope_squared(state, zeta);
}

PropositionReport check_proposition_conditions(const MccState& state, double tol,
                                               double margin) {
  require_distinct_rest_points(state);
  PropositionReport rep;

  const double v_minus = potential(state, state.z_minus);
  const double v_plus = potential(state, state.z_plus);
  rep.conjugate = std::abs(v_plus - v_minus) <= tol;

  // Interior condition normalized by the well depth at the midpoint: V is
  // quadratically tangent at the endpoints, so raw values near them are tiny.
  const double mid = 0.5 * (state.z_minus + state.z_plus);
  const double well = std::abs(potential(state, mid));
  rep.hetero_nondegen = well > 0.0;
  const int samples = 101;
  const double vmax = std::max(v_minus, v_plus);
  for (int i = 1; i <= samples && rep.hetero_nondegen; ++i) {
    const double t = static_cast<double>(i) / (samples + 1);
    const double z = state.z_minus + t * (state.z_plus - state.z_minus);
    if ((potential(state, z) - vmax) / well > -margin) rep.hetero_nondegen = false;
  }

  // V_zz(Z) = -kappa^2 at each rest point.
  const DecayRates k = decay_rates(state);
  rep.spectral_nondegen = (-k.kappa_minus * k.kappa_minus <= -margin) &&
                          (-k.kappa_plus * k.kappa_plus <= -margin);
  return rep;
}

DecayRates decay_rates(const MccState& state) {
  require_distinct_rest_points(state);
  const double k0 = mcc_kappa0(state.params);
  const double amp = std::abs(state.z_plus);
  DecayRates k;
  k.kappa_minus = k0 * amp / std::sqrt(mcc_denominator(state, 0.0));
  k.kappa_plus = k0 * amp / std::sqrt(mcc_denominator(state, state.z_plus));
  return k;
}

namespace {

// Integrates zeta' = dir * heteroclinic_slope(zeta) from x=0 out to the
// requested offsets (all >= 0, sorted ascending), switching to the linearized
// exponential tail once the orbit is within `switch_dist` of the rest point
// it approaches. dir = +1 walks toward Z+ (as written), dir = -1 walks the
// reversed orbit toward Z-.
std::vector<double> integrate_side(const MccState& state, double zeta0, double dir,
                                   std::span<const double> offsets) {
  namespace ode = boost::numeric::odeint;
  std::vector<double> out(offsets.size());
  if (offsets.empty()) return out;

  const double amp = std::abs(state.z_plus);
  const double switch_dist = 1e-8 * amp;
  const double target = dir > 0 ? state.z_plus : state.z_minus;
  const DecayRates rates = decay_rates(state);
  const double kappa = dir > 0 ? rates.kappa_plus : rates.kappa_minus;

  auto rhs = [&](const double& z, double& dzdx, double /*x*/) {
    dzdx = dir * heteroclinic_slope(state, z);
  };

  auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<double>>(1e-14, 1e-10);
  double z = zeta0;
  double x = 0.0;
  bool tail = false;
  double tail_gap = 0.0, tail_x0 = 0.0;
  for (size_t i = 0; i < offsets.size(); ++i) {
    const double xi = offsets[i];
    if (!tail) {
      if (xi > x) {
        double dt = std::min(0.1 / std::max(kappa, 1e-12), xi - x);
        ode::integrate_adaptive(stepper, rhs, z, x, xi, dt);
        x = xi;
      }
      if (std::abs(z - target) < switch_dist) {
        tail = true;
        tail_gap = z - target;
        tail_x0 = x;
      }
      out[i] = z;
    }
    if (tail) {
      out[i] = target + tail_gap * std::exp(-kappa * (xi - tail_x0));
    }
  }
  return out;
}

}  // namespace

std::vector<double> heteroclinic_profile(const MccState& state, std::span<const double> x,
                                         std::optional<double> zeta0) {
  require_distinct_rest_points(state);
  if (!std::is_sorted(x.begin(), x.end())) {
    throw InvalidParameterError("heteroclinic_profile: abscissae must be sorted");
  }
  const double z0 = zeta0.value_or(0.5 * (state.z_minus + state.z_plus));
  const double lo = std::min(state.z_minus, state.z_plus);
  const double hi = std::max(state.z_minus, state.z_plus);
  if (!(z0 > lo && z0 < hi)) {
    throw InvalidParameterError("phase value must lie strictly between the rest points");
  }

  // split the grid at 0 and integrate outward on each side
  std::vector<double> pos, neg;
  for (double xi : x) (xi >= 0.0 ? pos : neg).push_back(xi);
  std::reverse(neg.begin(), neg.end());
  for (double& v : neg) v = -v;  // offsets of the reversed orbit

  const std::vector<double> fwd = integrate_side(state, z0, +1.0, pos);
  const std::vector<double> bwd = integrate_side(state, z0, -1.0, neg);

  std::vector<double> out(x.size());
  size_t nneg = neg.size();
  for (size_t i = 0; i < nneg; ++i) out[nneg - 1 - i] = bwd[i];
  for (size_t i = 0; i < fwd.size(); ++i) out[nneg + i] = fwd[i];
  return out;
}

}  // namespace bore
