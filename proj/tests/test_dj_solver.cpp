#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <iostream>

#include "bore/continuation.hpp"
#include "bore/dj_solver.hpp"
#include "test_util.hpp"

using namespace bore;

namespace {

const FluidParameters kParams = make_parameters(2.0, 1.0);

StripGrid grid_for(double lambda, double L, int nq, int nlow, int nup) {
  return StripGrid::make(L, nq, nlow, nup, lambda);
}

StripGrid decay_grid(double lambda, int nq, int nlow, int nup, double efolds = 12.0) {
  const DecayRates k = decay_rates(make_mcc_state(kParams, lambda));
  const double L = efolds / std::min(k.kappa_minus, k.kappa_plus);
  return StripGrid::make(L, nq, nlow, nup, lambda);
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(StripGrid::make(0.0, 11, 5, 5, 0.4), InvalidParameterError);
  CHECK_THROWS_AS(StripGrid::make(1.0, 10, 5, 5, 0.4), InvalidParameterError);  // even n_q
  CHECK_THROWS_AS(StripGrid::make(1.0, 11, 2, 5, 0.4), InvalidParameterError);
  CHECK_THROWS_AS(StripGrid::make(1.0, 11, 5, 5, 1.2), InvalidParameterError);
  const StripGrid g = StripGrid::make(1.0, 11, 5, 7, 0.4);
  CHECK(g.n_v == 11);
  CHECK(g.p[0] == -0.4);
  CHECK(g.p[g.interface_k] == 0.0);
  CHECK(g.p[g.n_v - 1] == 0.6);
  CHECK(g.dp_low <= 0.4 / 2);
  CHECK(g.dp_up <= 0.6 / 2);
}

TEST_CASE("exact laminar residuals") {
  SUBCASE("upstream laminar: every equation row is a hard zero on every grid") {
    for (auto [lam, L, nq, nlow, nup] :
         {std::tuple{0.4, 5.0, 11, 5, 7}, std::tuple{0.37111, 3.0, 21, 9, 5},
          std::tuple{0.585786, 7.0, 31, 13, 13}, std::tuple{0.9, 2.0, 5, 17, 3}}) {
      const StripGrid g = grid_for(lam, L, nq, nlow, nup);
      const DiscreteFront f = laminar_front(kParams, g);
      CHECK(equation_residual_norm(f) == 0.0);
      // the only nonzero rows are the downstream closure column, where the
      // residual reports the distance from the conjugate data
      const Eigen::VectorXd r = dj_residual(f);
      const double amp = std::abs(kParams.lambda_star - lam);
      for (int k = 0; k < g.n_v; ++k) {
        CHECK(r[g.index(0, k)] == 0.0);
        CHECK(std::abs(r[g.index(g.n_q - 1, k)]) <= amp);
      }
      CHECK(r.lpNorm<Eigen::Infinity>() == doctest::Approx(amp).epsilon(1e-12));
    }
  }
  SUBCASE("downstream conjugate laminar: equation rows zero to rounding on every grid") {
    for (auto [nq, nlow, nup] :
         {std::tuple{11, 5, 5}, std::tuple{41, 21, 21}, std::tuple{81, 41, 41},
          std::tuple{31, 161, 161}}) {
      const StripGrid g = grid_for(0.4, 5.0, nq, nlow, nup);
      const DiscreteFront f = conjugate_front(kParams, g);
      CHECK(equation_residual_norm(f) <= 1e-12);
    }
  }
  SUBCASE("at lambda_star the two laminars coincide and solve the full system") {
    const StripGrid g = grid_for(kParams.lambda_star, 5.0, 21, 9, 9);
    CHECK(dj_residual(laminar_front(kParams, g)).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(dj_residual(conjugate_front(kParams, g)).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("seed residual scales like amplitude cubed") {
  // The interface residual of the long-wave seed carries the triple root
  // collision at onset: halving the amplitude divides the norm by ~8 (the
  // seed is consistent to better than the quadratic order one might expect).
  double prev = 0.0;
  for (double eps : {0.04, 0.02, 0.01}) {
    const double lam = kParams.lambda_star - eps;
    const StripGrid g = decay_grid(lam, 201, 21, 21);
    const DiscreteFront seed = seed_from_mcc(kParams, lam, g);
    const double norm = dj_residual(seed).lpNorm<Eigen::Infinity>();
    CHECK(norm > 0.0);
    if (prev > 0.0) {
      const double ratio = prev / norm;
      CHECK(ratio > 6.0);
      CHECK(ratio < 10.0);
    }
    prev = norm;
  }
}

TEST_CASE("jacobian matches central finite differences") {
  const double lam = kParams.lambda_star - 0.04;
  const StripGrid g = decay_grid(lam, 41, 9, 9);
  DiscreteFront f = seed_from_mcc(kParams, lam, g);
  testutil::Rng rng(17);
  for (int i = 0; i < f.h.size(); ++i) f.h[i] += 1e-4 * rng.normal();
  REQUIRE(stagnation_free(f));

  const Eigen::SparseMatrix<double> J = dj_jacobian(f);
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::VectorXd v(f.h.size());
    for (int i = 0; i < v.size(); ++i) v[i] = rng.normal();
    const double eps = 1e-6;
    DiscreteFront fp = f, fm = f;
    fp.h += eps * v;
    fm.h -= eps * v;
    const Eigen::VectorXd fd = (dj_residual(fp) - dj_residual(fm)) / (2.0 * eps);
    const Eigen::VectorXd jv = J * v;
    CHECK((fd - jv).lpNorm<Eigen::Infinity>() <= 1e-6 * jv.lpNorm<Eigen::Infinity>());
  }
}

TEST_CASE("jacobian at the upstream laminar front") {
  const double lam = 0.4;
  const StripGrid g = grid_for(lam, 4.0, 11, 7, 9);
  const DiscreteFront f = laminar_front(kParams, g);
  const Eigen::SparseMatrix<double> J = dj_jacobian(f);

  // x-independent perturbation w(p), zero at the walls
  Eigen::VectorXd w(g.n_v);
  for (int k = 0; k < g.n_v; ++k) {
    const double t = g.p[k] + lam;  // 0 at the bottom wall
    w[k] = std::sin(3.1 * t) * (1.0 - lam - g.p[k]);
  }
  w[0] = 0.0;
  w[g.n_v - 1] = 0.0;
  Eigen::VectorXd v(g.size());
  for (int j = 0; j < g.n_q; ++j)
    for (int k = 0; k < g.n_v; ++k) v[g.index(j, k)] = w[k];
  const Eigen::VectorXd jv = J * v;

  for (int j = 1; j < g.n_q - 1; ++j) {
    for (int k = 1; k < g.n_v - 1; ++k) {
      if (k == g.interface_k) continue;
      // interior rows reduce to the plain second difference of w (the rows
      // carry the dp^2 scaling)
      const double expect = w[k + 1] - 2.0 * w[k] + w[k - 1];
      CHECK(jv[g.index(j, k)] == doctest::Approx(expect).epsilon(1e-12));
    }
    // interface row reduces to the transmission row of the transversal pencil
    const int K = g.interface_k;
    const double wm = (3.0 * w[K] - 4.0 * w[K - 1] + w[K - 2]) / (2.0 * g.dp_low);
    const double wp = (-3.0 * w[K] + 4.0 * w[K + 1] - w[K + 2]) / (2.0 * g.dp_up);
    const double expect = -(kParams.rho2 * wp - kParams.rho1 * wm) +
                          kParams.density_jump() / kParams.froude_sq * w[K];
    CHECK(jv[g.index(j, K)] == doctest::Approx(expect).epsilon(1e-12));
  }
  // Dirichlet rows are the identity
  for (int k = 0; k < g.n_v; ++k) {
    CHECK(jv[g.index(0, k)] == w[k]);
    CHECK(jv[g.index(g.n_q - 1, k)] == w[k]);
  }
}

TEST_CASE("newton solver") {
  SUBCASE("exact laminar returns unchanged") {
    // at lambda = lambda_star the laminar flow solves the full truncated
    // system including both closure columns
    const StripGrid g = grid_for(kParams.lambda_star, 5.0, 21, 9, 9);
    const DiscreteFront f = laminar_front(kParams, g);
    NewtonReport rep;
    const DiscreteFront out = newton_solve(f, 1e-10, 50, &rep);
    CHECK(rep.iterations == 0);
    CHECK(out.h == f.h);
  }
  SUBCASE("inadmissible guess is rejected immediately") {
    const StripGrid g = grid_for(0.4, 5.0, 21, 9, 9);
    DiscreteFront f = laminar_front(kParams, g);
    f.h[g.index(10, 3)] = f.h[g.index(10, 5)] + 0.1;  // break vertical monotonicity
    CHECK_THROWS_AS(newton_solve(f, 1e-10), StagnationViolationError);
  }
  SUBCASE("long-wave seed converges with quadratic contraction") {
    const double lam = kParams.lambda_star - 0.02;
    const StripGrid g = decay_grid(lam, 401, 41, 41);
    const DiscreteFront seed = seed_from_mcc(kParams, lam, g);
    NewtonReport rep;
    const DiscreteFront f = newton_solve(seed, 1e-9, 50, &rep);
    CHECK(dj_residual(f).lpNorm<Eigen::Infinity>() <= 1e-9);
    REQUIRE(rep.norms.size() >= 3);
    const size_t n = rep.norms.size();
    CHECK(rep.norms[n - 1] / rep.norms[n - 2] <= 0.1);
    CHECK(rep.norms[n - 2] / rep.norms[n - 3] <= 0.1);
    std::cout << "newton history:";
    for (double v : rep.norms) std::cout << " " << v;
    std::cout << "\n";
  }
}

TEST_CASE("seed construction") {
  SUBCASE("degenerate at lambda_star") {
    const StripGrid g = grid_for(kParams.lambda_star, 5.0, 11, 5, 5);
    CHECK_THROWS_AS(seed_from_mcc(kParams, kParams.lambda_star, g), DegenerateRestPointError);
  }
  SUBCASE("interface row equals the long-wave profile exactly") {
    const double lam = kParams.lambda_star - 0.04;
    const StripGrid g = decay_grid(lam, 101, 9, 9);
    const DiscreteFront seed = seed_from_mcc(kParams, lam, g);
    const MccState mcc = make_mcc_state(kParams, lam);
    std::vector<double> x(g.n_q);
    for (int j = 0; j < g.n_q; ++j) x[j] = g.q(j);
    const std::vector<double> zeta = heteroclinic_profile(mcc, x);
    for (int j = 0; j < g.n_q; ++j) {
      CHECK(seed.at(j, g.interface_k) == zeta[j]);
    }
  }
  SUBCASE("seeds stay stagnation-free on both branches") {
    for (double lam : {kParams.lambda_star - 0.05, kParams.lambda_star + 0.05}) {
      const StripGrid g = decay_grid(lam, 101, 9, 9);
      CHECK(stagnation_free(seed_from_mcc(kParams, lam, g)));
    }
  }
}

TEST_CASE("physical reconstruction") {
  SUBCASE("laminar front") {
    const StripGrid g = grid_for(0.4, 5.0, 21, 9, 11);
    const PhysicalFields f = reconstruct_physical(laminar_front(kParams, g));
    CHECK(f.eta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(f.eta_x.cwiseAbs().maxCoeff() == 0.0);
    CHECK((f.psi_y.array() + 1.0).abs().maxCoeff() < 1e-10);
    CHECK(f.psi_x.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("converged elevation bore: eta_x > 0, psi_x > 0, psi_y < 0") {
    const double lam = kParams.lambda_star - 0.04;
    const StripGrid g = decay_grid(lam, 201, 21, 21);
    const DiscreteFront f = newton_solve(seed_from_mcc(kParams, lam, g), 5e-8);
    const PhysicalFields phys = reconstruct_physical(f);
    for (int j = 1; j < g.n_q - 1; ++j) {
      CHECK(phys.eta_x[j] > 0.0);
      // strict sign in the open layers and on the interface; psi_x vanishes
      // identically on the walls (they are streamlines)
      for (int k = 1; k < g.n_v - 1; ++k) {
        CHECK(phys.psi_x(j, k) > 0.0);
      }
      CHECK(phys.psi_x(j, 0) == 0.0);
      CHECK(phys.psi_x(j, g.n_v - 1) == 0.0);
      for (int k = 0; k < g.n_v; ++k) {
        CHECK(phys.psi_y(j, k) < 0.0);
      }
    }
    // downstream column is pinned to the conjugate deflection
    CHECK(std::abs(phys.eta[g.n_q - 1] - (kParams.lambda_star - lam)) <= 1e-12);
  }
}

TEST_CASE("front invariants") {
  const double eps = 0.04;
  const double lam = kParams.lambda_star - eps;
  const DecayRates k = decay_rates(make_mcc_state(kParams, lam));

  SUBCASE("interfaces are monotone in q at every vertical level") {
    const StripGrid g = decay_grid(lam, 201, 21, 21);
    const DiscreteFront f = newton_solve(seed_from_mcc(kParams, lam, g), 5e-8);
    for (int k2 = 0; k2 < g.n_v; ++k2) {
      for (int j = 1; j < g.n_q - 1; ++j) {
        CHECK(f.at(j + 1, k2) - f.at(j - 1, k2) >= 0.0);
      }
    }
  }
  SUBCASE("grid convergence of eta(0) at order >= 1.8") {
    const double L = 12.0 / k.kappa_minus;
    double eta[3];
    int nq = 101, nv = 11;
    // attainable Newton floors tighten with refinement
    const double tols[3] = {5e-7, 5e-8, 1e-8};
    for (int level = 0; level < 3; ++level) {
      const StripGrid g = grid_for(lam, L, nq, nv, nv);
      const DiscreteFront f = newton_solve(seed_from_mcc(kParams, lam, g), tols[level]);
      eta[level] = f.at((g.n_q - 1) / 2, g.interface_k);
      nq = 2 * nq - 1;
      nv = 2 * nv - 1;
    }
    const double e1 = std::abs(eta[1] - eta[0]);
    const double e2 = std::abs(eta[2] - eta[1]);
    const double order = std::log2(e1 / e2);
    CHECK(order >= 1.8);
  }
  SUBCASE("doubling L moves eta(0) by at most the truncation tail") {
    const double L = 8.0 / k.kappa_minus;
    double eta[2];
    for (int level = 0; level < 2; ++level) {
      const StripGrid g = grid_for(lam, L * (level + 1), 201 + 200 * level, 15, 15);
      const DiscreteFront f = newton_solve(seed_from_mcc(kParams, lam, g), 2e-7);
      eta[level] = f.at((g.n_q - 1) / 2, g.interface_k);
    }
    CHECK(std::abs(eta[1] - eta[0]) <= 10.0 * eps * std::exp(-k.kappa_minus * L));
  }
  SUBCASE("reflection maps a converged front to the reflected solution") {
    const StripGrid g = decay_grid(lam, 201, 21, 21);
    const DiscreteFront f = newton_solve(seed_from_mcc(kParams, lam, g), 5e-8);
    DiscreteFront r = f;
    for (int j = 0; j < g.n_q; ++j)
      for (int k2 = 0; k2 < g.n_v; ++k2) r.h[g.index(j, k2)] = f.at(g.n_q - 1 - j, k2);
    const Eigen::VectorXd res = dj_residual(r);
    double interior_norm = 0.0;
    for (int j = 0; j < g.n_q; ++j) {
      for (int k2 = 0; k2 < g.n_v; ++k2) {
        if (row_kind(g, j, k2) == RowKind::Lateral) continue;  // swapped Dirichlet data
        interior_norm = std::max(interior_norm, std::abs(res[g.index(j, k2)]));
      }
    }
    CHECK(interior_norm <= 1e-7);
  }
}
