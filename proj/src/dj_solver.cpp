#include "bore/dj_solver.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <cstdio>
#include <string>

namespace bore {

namespace {

// Deviation of the downstream laminar column from the upstream one (h - p),
// linear within each layer and zero on the outer walls.
Eigen::VectorXd downstream_deviation(const FluidParameters& params, const StripGrid& g) {
  const double lam = g.lambda;
  const double amp = params.lambda_star - lam;
  Eigen::VectorXd u(g.n_v);
  for (int k = 0; k <= g.interface_k; ++k) u[k] = (g.p[k] + lam) * amp / lam;
  for (int k = g.interface_k; k < g.n_v; ++k) u[k] = amp * (1.0 - g.p[k] / (1.0 - lam));
  u[0] = 0.0;
  u[g.n_v - 1] = 0.0;
  return u;
}

}  // namespace

DiscreteFront laminar_front(const FluidParameters& params, const StripGrid& grid) {
  DiscreteFront f;
  f.grid = grid;
  f.params = params;
  f.h.resize(grid.size());
  for (int j = 0; j < grid.n_q; ++j)
    for (int k = 0; k < grid.n_v; ++k) f.h[grid.index(j, k)] = grid.p[k];
  return f;
}

Eigen::VectorXd downstream_column(const FluidParameters& params, const StripGrid& grid) {
  return grid.p + downstream_deviation(params, grid);
}

DiscreteFront conjugate_front(const FluidParameters& params, const StripGrid& grid) {
  DiscreteFront f;
  f.grid = grid;
  f.params = params;
  f.h.resize(grid.size());
  const Eigen::VectorXd col = downstream_column(params, grid);
  for (int j = 0; j < grid.n_q; ++j)
    for (int k = 0; k < grid.n_v; ++k) f.h[grid.index(j, k)] = col[k];
  return f;
}

DiscreteFront seed_from_mcc(const FluidParameters& params, double lambda, const StripGrid& grid) {
  const MccState mcc = make_mcc_state(params, lambda);
  if (mcc.z_plus == 0.0) {
    throw DegenerateRestPointError("seed_from_mcc: lambda == lambda_star");
  }
  std::vector<double> x(grid.n_q);
  for (int j = 0; j < grid.n_q; ++j) x[j] = grid.q(j);
  const std::vector<double> zeta = heteroclinic_profile(mcc, x);

  DiscreteFront f;
  f.grid = grid;
  f.params = params;
  f.h.resize(grid.size());
  for (int j = 0; j < grid.n_q; ++j) {
    const double z = zeta[j];
    for (int k = 0; k <= grid.interface_k; ++k) {
      const double u = (grid.p[k] + lambda) * z / lambda;
      f.h[grid.index(j, k)] = grid.p[k] + u;
    }
    for (int k = grid.interface_k; k < grid.n_v; ++k) {
      const double u = z * (1.0 - grid.p[k] / (1.0 - lambda));
      f.h[grid.index(j, k)] = grid.p[k] + u;
    }
    f.h[grid.index(j, grid.interface_k)] = z;  // p = 0 there, keep zeta bit-exact
  }
  return f;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> interface_slopes(const DiscreteFront& front) {
  const StripGrid& g = front.grid;
  const int K = g.interface_k;
  Eigen::VectorXd lo(g.n_q), up(g.n_q);
  for (int j = 0; j < g.n_q; ++j) {
    lo[j] = (3.0 * front.at(j, K) - 4.0 * front.at(j, K - 1) + front.at(j, K - 2)) /
            (2.0 * g.dp_low);
    up[j] = (-3.0 * front.at(j, K) + 4.0 * front.at(j, K + 1) - front.at(j, K + 2)) /
            (2.0 * g.dp_up);
  }
  return {lo, up};
}

bool stagnation_free(const DiscreteFront& front) {
  const StripGrid& g = front.grid;
  for (int j = 0; j < g.n_q; ++j) {
    for (int k = 0; k + 1 < g.n_v; ++k) {
      if (!(front.at(j, k + 1) - front.at(j, k) > 0.0)) return false;
    }
  }
  const auto [lo, up] = interface_slopes(front);
  return (lo.array() > 0.0).all() && (up.array() > 0.0).all();
}

double stagnation_margin(const DiscreteFront& front) {
  const auto [lo, up] = interface_slopes(front);
  const double worst = std::max(lo.maxCoeff(), up.maxCoeff());
  return 1.0 / worst;
}

Eigen::VectorXd dj_residual(const DiscreteFront& front) {
  const StripGrid& g = front.grid;
  const FluidParameters& P = front.params;
  if (!stagnation_free(front)) {
    throw StagnationViolationError("dj_residual: h_p <= 0 (horizontal stagnation)");
  }
  const int K = g.interface_k;
  const int nv = g.n_v;
  const double jr = P.density_jump();
  const double jrF2 = jr / P.froude_sq;

  // deviation from the upstream laminar solution
  Eigen::VectorXd u = front.h;
  for (int j = 0; j < g.n_q; ++j)
    for (int k = 0; k < nv; ++k) u[g.index(j, k)] -= g.p[k];
  const Eigen::VectorXd u_down = downstream_deviation(P, g);

  Eigen::VectorXd R(g.size());
  auto U = [&](int j, int k) { return u[g.index(j, k)]; };

  for (int k = 0; k < nv; ++k) {
    R[g.index(0, k)] = U(0, k);                       // upstream Dirichlet
    R[g.index(g.n_q - 1, k)] = U(g.n_q - 1, k) - u_down[k];  // downstream Dirichlet
  }
  for (int j = 1; j < g.n_q - 1; ++j) {
    R[g.index(j, 0)] = U(j, 0);
    R[g.index(j, nv - 1)] = U(j, nv - 1);

    for (int k = 1; k < nv - 1; ++k) {
      if (k == K) continue;
      const double dp = g.dp_at(k);
      const double uq = (U(j + 1, k) - U(j - 1, k)) / (2.0 * g.dq);
      const double uqq = (U(j + 1, k) - 2.0 * U(j, k) + U(j - 1, k)) / (g.dq * g.dq);
      const double upp = U(j, k + 1) - 2.0 * U(j, k) + U(j, k - 1);  // times dp^2
      const double up = (U(j, k + 1) - U(j, k - 1)) / (2.0 * dp);
      const double uqp = (U(j + 1, k + 1) - U(j + 1, k - 1) - U(j - 1, k + 1) + U(j - 1, k - 1)) /
                         (4.0 * g.dq * dp);
      const double hp = 1.0 + up;
      R[g.index(j, k)] =
          (1.0 + uq * uq) * upp + (-2.0 * uq * hp * uqp + hp * hp * uqq) * dp * dp;
    }

    // dynamic condition at the interface, one-sided h_p from each layer
    const double uq = (U(j + 1, K) - U(j - 1, K)) / (2.0 * g.dq);
    const double sm =
        1.0 + (3.0 * U(j, K) - 4.0 * U(j, K - 1) + U(j, K - 2)) / (2.0 * g.dp_low);
    const double sp =
        1.0 + (-3.0 * U(j, K) + 4.0 * U(j, K + 1) - U(j, K + 2)) / (2.0 * g.dp_up);
    const double A = 1.0 + uq * uq;
    const double h0 = front.h[g.index(j, K)];
    R[g.index(j, K)] =
        0.5 * (P.rho2 * A / (sp * sp) - P.rho1 * A / (sm * sm)) + jrF2 * h0 - 0.5 * jr;
  }
  return R;
}

double equation_residual_norm(const DiscreteFront& front) {
  const Eigen::VectorXd r = dj_residual(front);
  const StripGrid& g = front.grid;
  double norm = 0.0;
  for (int j = 1; j < g.n_q - 1; ++j) {
    for (int k = 0; k < g.n_v; ++k) {
      norm = std::max(norm, std::abs(r[g.index(j, k)]));
    }
  }
  return norm;
}

Eigen::SparseMatrix<double> dj_jacobian(const DiscreteFront& front) {
  const StripGrid& g = front.grid;
  const FluidParameters& P = front.params;
  if (!stagnation_free(front)) {
    throw StagnationViolationError("dj_jacobian: h_p <= 0 (horizontal stagnation)");
  }
  const int K = g.interface_k;
  const int nv = g.n_v;
  const double jrF2 = P.density_jump() / P.froude_sq;

  Eigen::VectorXd u = front.h;
  for (int j = 0; j < g.n_q; ++j)
    for (int k = 0; k < nv; ++k) u[g.index(j, k)] -= g.p[k];
  auto U = [&](int j, int k) { return u[g.index(j, k)]; };

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(g.size()) * 9);
  auto add = [&](int r, int c, double v) { trip.emplace_back(r, c, v); };

  for (int k = 0; k < nv; ++k) {
    add(g.index(0, k), g.index(0, k), 1.0);
    add(g.index(g.n_q - 1, k), g.index(g.n_q - 1, k), 1.0);
  }
  for (int j = 1; j < g.n_q - 1; ++j) {
    add(g.index(j, 0), g.index(j, 0), 1.0);
    add(g.index(j, nv - 1), g.index(j, nv - 1), 1.0);

    for (int k = 1; k < nv - 1; ++k) {
      if (k == K) continue;
      const double dp = g.dp_at(k);
      const double uq = (U(j + 1, k) - U(j - 1, k)) / (2.0 * g.dq);
      const double uqq = (U(j + 1, k) - 2.0 * U(j, k) + U(j - 1, k)) / (g.dq * g.dq);
      const double upp = U(j, k + 1) - 2.0 * U(j, k) + U(j, k - 1);
      const double up = (U(j, k + 1) - U(j, k - 1)) / (2.0 * dp);
      const double uqp = (U(j + 1, k + 1) - U(j + 1, k - 1) - U(j - 1, k + 1) + U(j - 1, k - 1)) /
                         (4.0 * g.dq * dp);
      const double hp = 1.0 + up;
      const double dp2 = dp * dp;

      const double d_uq = 2.0 * uq * upp - 2.0 * hp * uqp * dp2;
      const double d_upp = 1.0 + uq * uq;
      const double d_up = (-2.0 * uq * uqp + 2.0 * hp * uqq) * dp2;
      const double d_uqq = hp * hp * dp2;
      const double d_uqp = -2.0 * uq * hp * dp2;

      const int r = g.index(j, k);
      add(r, g.index(j + 1, k), d_uq / (2.0 * g.dq) + d_uqq / (g.dq * g.dq));
      add(r, g.index(j - 1, k), -d_uq / (2.0 * g.dq) + d_uqq / (g.dq * g.dq));
      add(r, g.index(j, k), -2.0 * d_upp - 2.0 * d_uqq / (g.dq * g.dq));
      add(r, g.index(j, k + 1), d_upp + d_up / (2.0 * dp));
      add(r, g.index(j, k - 1), d_upp - d_up / (2.0 * dp));
      const double c = d_uqp / (4.0 * g.dq * dp);
      add(r, g.index(j + 1, k + 1), c);
      add(r, g.index(j - 1, k - 1), c);
      add(r, g.index(j + 1, k - 1), -c);
      add(r, g.index(j - 1, k + 1), -c);
    }

    const double uq = (U(j + 1, K) - U(j - 1, K)) / (2.0 * g.dq);
    const double sm =
        1.0 + (3.0 * U(j, K) - 4.0 * U(j, K - 1) + U(j, K - 2)) / (2.0 * g.dp_low);
    const double sp =
        1.0 + (-3.0 * U(j, K) + 4.0 * U(j, K + 1) - U(j, K + 2)) / (2.0 * g.dp_up);
    const double A = 1.0 + uq * uq;

    const double d_uq = uq * (P.rho2 / (sp * sp) - P.rho1 / (sm * sm));
    const double d_sm = A * P.rho1 / (sm * sm * sm);
    const double d_sp = -A * P.rho2 / (sp * sp * sp);

    const int r = g.index(j, K);
    add(r, g.index(j + 1, K), d_uq / (2.0 * g.dq));
    add(r, g.index(j - 1, K), -d_uq / (2.0 * g.dq));
    add(r, g.index(j, K),
        d_sm * 3.0 / (2.0 * g.dp_low) - d_sp * 3.0 / (2.0 * g.dp_up) + jrF2);
    add(r, g.index(j, K - 1), -d_sm * 4.0 / (2.0 * g.dp_low));
    add(r, g.index(j, K - 2), d_sm / (2.0 * g.dp_low));
    add(r, g.index(j, K + 1), d_sp * 4.0 / (2.0 * g.dp_up));
    add(r, g.index(j, K + 2), -d_sp / (2.0 * g.dp_up));
  }

  Eigen::SparseMatrix<double> J(g.size(), g.size());
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

DiscreteFront newton_solve(const DiscreteFront& guess, double tol, int max_iter,
                           NewtonReport* report) {
  if (!stagnation_free(guess)) {
    throw StagnationViolationError("newton_solve: guess violates h_p > 0");
  }
  DiscreteFront f = guess;
  NewtonReport rep;
  Eigen::VectorXd R = dj_residual(f);
  double norm = R.lpNorm<Eigen::Infinity>();
  rep.norms.push_back(norm);

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  int slow_streak = 0;
  for (int it = 0; it < max_iter; ++it) {
    if (norm <= tol) break;
    lu.compute(dj_jacobian(f));
    if (lu.info() != Eigen::Success) {
      throw NumericalFailureError("newton_solve: sparse factorization failed");
    }
    const Eigen::VectorXd step = lu.solve(-R);

    double alpha = 1.0;
    bool accepted = false;
    bool any_admissible = false;
    DiscreteFront trial = f;
    for (int halving = 0; halving <= 8; ++halving) {
      trial.h = f.h + alpha * step;
      if (stagnation_free(trial)) {
        any_admissible = true;
        const Eigen::VectorXd Rt = dj_residual(trial);
        const double nt = Rt.lpNorm<Eigen::Infinity>();
        if (nt < norm || nt <= tol) {
          f = trial;
          R = Rt;
          norm = nt;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    rep.iterations = it + 1;
    if (!accepted) {
      if (!any_admissible) {
        throw BoundaryOfDomainError(
            "newton_solve: no step length keeps h_p > 0 (stagnation boundary reached)");
      }
      char msg[96];
      std::snprintf(msg, sizeof(msg), "newton_solve: line search stalled at residual %.3e",
                    norm);
      if (report) *report = rep;
      throw ConvergenceFailureError(msg);
    }
    // residual barely moving: the iterate sits at the attainable floor
    slow_streak = norm > 0.9 * rep.norms.back() ? slow_streak + 1 : 0;
    rep.norms.push_back(norm);
    if (slow_streak >= 3 && norm > tol) {
      char msg[96];
      std::snprintf(msg, sizeof(msg), "newton_solve: progress stalled at residual %.3e", norm);
      if (report) *report = rep;
      throw ConvergenceFailureError(msg);
    }
  }
  rep.final_norm = norm;
  if (report) *report = rep;
  if (norm > tol) {
    char msg[96];
    std::snprintf(msg, sizeof(msg), "newton_solve: no convergence in %d iterations, residual %.3e",
                  max_iter, norm);
    throw ConvergenceFailureError(msg);
  }
  return f;
}

PhysicalFields reconstruct_physical(const DiscreteFront& front) {
  const StripGrid& g = front.grid;
  const int K = g.interface_k;
  PhysicalFields out;
  out.eta.resize(g.n_q);
  out.eta_x.resize(g.n_q);
  out.psi_x.resize(g.n_q, g.n_v);
  out.psi_y.resize(g.n_q, g.n_v);

  for (int j = 0; j < g.n_q; ++j) out.eta[j] = front.at(j, K);
  for (int j = 1; j < g.n_q - 1; ++j)
    out.eta_x[j] = (out.eta[j + 1] - out.eta[j - 1]) / (2.0 * g.dq);
  out.eta_x[0] = (out.eta[1] - out.eta[0]) / g.dq;
  out.eta_x[g.n_q - 1] = (out.eta[g.n_q - 1] - out.eta[g.n_q - 2]) / g.dq;

  auto hp_at = [&](int j, int k) {
    // one-sided 3-point stencils at layer edges, centered inside
    if (k == 0) {
      return (-3.0 * front.at(j, 0) + 4.0 * front.at(j, 1) - front.at(j, 2)) / (2.0 * g.dp_low);
    }
    if (k == K) {
      return (3.0 * front.at(j, K) - 4.0 * front.at(j, K - 1) + front.at(j, K - 2)) /
             (2.0 * g.dp_low);
    }
    if (k == g.n_v - 1) {
      return (3.0 * front.at(j, k) - 4.0 * front.at(j, k - 1) + front.at(j, k - 2)) /
             (2.0 * g.dp_up);
    }
    const double dp = g.dp_at(k);
    return (front.at(j, k + 1) - front.at(j, k - 1)) / (2.0 * dp);
  };
  auto hq_at = [&](int j, int k) {
    if (j == 0) return (front.at(1, k) - front.at(0, k)) / g.dq;
    if (j == g.n_q - 1) return (front.at(j, k) - front.at(j - 1, k)) / g.dq;
    return (front.at(j + 1, k) - front.at(j - 1, k)) / (2.0 * g.dq);
  };

  for (int j = 0; j < g.n_q; ++j) {
    for (int k = 0; k < g.n_v; ++k) {
      const double hp = hp_at(j, k);
      out.psi_y(j, k) = -1.0 / hp;
      out.psi_x(j, k) = hq_at(j, k) / hp;
    }
  }
  return out;
}

}  // namespace bore
