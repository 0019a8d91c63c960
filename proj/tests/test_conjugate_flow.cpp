#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bore/conjugate_flow.hpp"
#include "test_util.hpp"

using namespace bore;

TEST_CASE("critical constants from the density pair") {
  SUBCASE("rho = (2,1): F^2 = 3 - 2 sqrt 2, lambda* = 2 - sqrt 2") {
    const FluidParameters p = make_parameters(2.0, 1.0);
    // high-precision closed forms as the oracle
    const long double f2 = 3.0L - 2.0L * std::sqrt(2.0L);
    const long double ls = 2.0L - std::sqrt(2.0L);
    CHECK(std::abs(p.froude_sq - static_cast<double>(f2)) < 1e-15);
    CHECK(std::abs(p.lambda_star - static_cast<double>(ls)) < 1e-15);
    CHECK(p.froude_sq == doctest::Approx(0.171573).epsilon(1e-5));
    CHECK(p.lambda_star == doctest::Approx(0.585786).epsilon(1e-5));
  }
  SUBCASE("rho = (4,1): exact rationals") {
    const FluidParameters p = make_parameters(4.0, 1.0);
    CHECK(p.froude_sq == 1.0 / 3.0);
    CHECK(p.lambda_star == 2.0 / 3.0);
  }
  SUBCASE("degenerate and invalid densities") {
    CHECK_THROWS_AS(make_parameters(1.0, 1.0), DegenerateStratificationError);
    CHECK_THROWS_AS(make_parameters(1.0, 2.0), InvalidParameterError);
    CHECK_THROWS_AS(make_parameters(-1.0, -2.0), InvalidParameterError);
    CHECK_THROWS_AS(make_parameters(std::nan(""), 1.0), InvalidParameterError);
    CHECK_THROWS_AS(make_parameters(2.0, 0.0), InvalidParameterError);
  }
  SUBCASE("lambda* always lies in (1/2, 1)") {
    testutil::Rng rng(7);
    for (int i = 0; i < 200; ++i) {
      const double r2 = rng.uniform(0.1, 3.0);
      const double r1 = r2 * rng.uniform(1.01, 30.0);
      const FluidParameters p = make_parameters(r1, r2);
      CHECK(p.lambda_star > 0.5);
      CHECK(p.lambda_star < 1.0);
      CHECK(p.froude_sq > 0.0);
      CHECK(p.froude_sq < 1.0);
    }
  }
}

TEST_CASE("dynamic condition residual") {
  const FluidParameters p = make_parameters(2.0, 1.0);
  const double lam = 0.4;

  SUBCASE("upstream state gives a hard zero") {
    CHECK(dynamic_condition_residual(p, lam, lam, 1.0, 1.0) == 0.0);
  }
  SUBCASE("root at lambda_star matches the closed form") {
    const LaminarState down = downstream_state(p, lam);
    const double r =
        dynamic_condition_residual(p, lam, down.lower_depth, down.lower_speed, down.upper_speed);
    CHECK(std::abs(r) < 1e-12);
    // oracle: root-find in d1 and confirm it is lambda_star
    auto res_at = [&](double d1) {
      const LaminarState s = laminar_state(p, lam, d1);
      return dynamic_condition_residual(p, lam, d1, s.lower_speed, s.upper_speed);
    };
    const double root = testutil::bisect(res_at, p.lambda_star - 0.05, p.lambda_star + 0.05);
    CHECK(std::abs(root - p.lambda_star) < 1e-10);
  }
  SUBCASE("sign flip across lambda_star") {
    auto res_at = [&](double d1) {
      const LaminarState s = laminar_state(p, lam, d1);
      return dynamic_condition_residual(p, lam, d1, s.lower_speed, s.upper_speed);
    };
    const double below = res_at(p.lambda_star - 0.01);
    const double above = res_at(p.lambda_star + 0.01);
    CHECK(below != 0.0);
    CHECK(above != 0.0);
    CHECK(below * above < 0.0);
  }
  SUBCASE("precondition violations") {
    CHECK_THROWS_AS(dynamic_condition_residual(p, lam, 0.0, 1.0, 1.0), InvalidStateError);
    CHECK_THROWS_AS(dynamic_condition_residual(p, lam, 1.0, 1.0, 1.0), InvalidStateError);
    CHECK_THROWS_AS(dynamic_condition_residual(p, lam, 0.5, std::nan(""), 1.0),
                    InvalidParameterError);
  }
}

TEST_CASE("flow force") {
  const FluidParameters p = make_parameters(2.0, 1.0);
  const double lam = 0.4;
  const LaminarState up = upstream_state(p, lam);
  const LaminarState down = downstream_state(p, lam);
  const double s_up = flow_force(p, lam, up.lower_depth, up.lower_speed, up.upper_speed);
  const double s_down = flow_force(p, lam, down.lower_depth, down.lower_speed, down.upper_speed);

  SUBCASE("upstream and conjugate downstream agree") {
    CHECK(std::abs(s_up - s_down) < 1e-10);
  }
  SUBCASE("quadrature oracle reproduces the closed form") {
    // integrate each layer separately so Simpson sees smooth integrands
    auto quad = [&p, lam](LaminarState st) {
      const double ys = st.lower_depth - lam;
      auto piece = [&p](double rho, double u) {
        return [&p, rho, u](double y) {
          const double pr = 0.5 * rho - 0.5 * rho * u * u - rho * y / p.froude_sq;
          return pr + rho * u * u;
        };
      };
      return testutil::simpson(piece(p.rho1, st.lower_speed), -lam, ys, 5000) +
             testutil::simpson(piece(p.rho2, st.upper_speed), ys, 1.0 - lam, 5000);
    };
    CHECK(std::abs(quad(up) - s_up) < 1e-10);
    CHECK(std::abs(quad(down) - s_down) < 1e-10);
  }
  SUBCASE("non-conjugate depth changes the flow force") {
    const double d1 = p.lambda_star + 0.05;
    const LaminarState st = laminar_state(p, lam, d1);
    const double s = flow_force(p, lam, d1, st.lower_speed, st.upper_speed);
    CHECK(std::abs(s - s_up) > 1e-8);
  }
  SUBCASE("at lambda = lambda_star the two states coincide") {
    const double ls = p.lambda_star;
    const LaminarState u2 = upstream_state(p, ls);
    const LaminarState d2 = downstream_state(p, ls);
    CHECK(flow_force(p, ls, u2.lower_depth, u2.lower_speed, u2.upper_speed) ==
          flow_force(p, ls, d2.lower_depth, d2.lower_speed, d2.upper_speed));
  }
  SUBCASE("invalid depth") {
    CHECK_THROWS_AS(flow_force(p, lam, 1.5, 1.0, 1.0), InvalidStateError);
  }
}

TEST_CASE("depth quadratic has a vanishing discriminant with double root lambda_star") {
  testutil::Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double r2 = rng.uniform(0.1, 3.0);
    const double r1 = r2 * rng.uniform(1.05, 20.0);
    const FluidParameters p = make_parameters(r1, r2);
    const double dr = r1 - r2;
    const double scale = dr * dr * (1.0 + p.froude_sq) * (1.0 + p.froude_sq);
    CHECK(std::abs(depth_quadratic_discriminant(p)) <= 1e-12 * scale);
    CHECK(std::abs(depth_quadratic(p, p.lambda_star)) <= 1e-13 * std::max(1.0, r1));
    // double root: the quadratic is nonnegative around lambda_star
    CHECK(depth_quadratic(p, p.lambda_star - 0.01) > 0.0);
    CHECK(depth_quadratic(p, p.lambda_star + 0.01) > 0.0);
  }
}

TEST_CASE("mass flux per layer is fixed by construction") {
  const FluidParameters p = make_parameters(2.0, 1.0);
  testutil::Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double lam = rng.uniform(0.05, 0.95);
    const double d1 = rng.uniform(0.05, 0.95);
    const LaminarState st = laminar_state(p, lam, d1);
    CHECK(st.lower_flux(lam) == lam);
    CHECK(st.upper_flux(lam) == 1.0 - lam);
    // the derived speeds reproduce the fluxes to rounding
    CHECK(std::abs(st.lower_speed * st.lower_depth - lam) < 1e-15);
    CHECK(std::abs(st.upper_speed * (1.0 - st.lower_depth) - (1.0 - lam)) < 1e-15);
  }
}

// The residual runs from -inf (d1 -> 0) to +inf (d1 -> 1), so it must cross
// zero an odd number of times: the crossings are d1 = lambda, d1 = lambda_star
// and one intermediate root between them (a state matching mass flux and
// energy but not flow force).
TEST_CASE("dynamic residual root structure in d1") {
  testutil::Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const double r2 = rng.uniform(0.2, 2.0);
    const double r1 = r2 * rng.uniform(1.1, 10.0);
    const FluidParameters p = make_parameters(r1, r2);
    double lam = rng.uniform(0.1, 0.9);
    if (std::abs(lam - p.lambda_star) < 2e-2) lam = p.lambda_star - 0.1;

    auto res_at = [&](double d1) {
      const LaminarState s = laminar_state(p, lam, d1);
      return dynamic_condition_residual(p, lam, d1, s.lower_speed, s.upper_speed);
    };
    const int n = 20000;
    int changes = 0;
    std::vector<double> roots;
    double prev_d = 1e-4, prev_v = res_at(prev_d);
    for (int i = 1; i <= n; ++i) {
      const double d = 1e-4 + (1.0 - 2e-4) * i / n;
      const double v = res_at(d);
      if (prev_v * v < 0.0) {
        ++changes;
        roots.push_back(testutil::bisect(res_at, prev_d, d));
      }
      prev_d = d;
      prev_v = v;
    }
    REQUIRE(changes == 3);
    const double lo = std::min(lam, p.lambda_star);
    const double hi = std::max(lam, p.lambda_star);
    CHECK(std::abs(roots.front() - lo) < 1e-9);
    CHECK(std::abs(roots.back() - hi) < 1e-9);
    CHECK(roots[1] > lo);
    CHECK(roots[1] < hi);
  }
}
