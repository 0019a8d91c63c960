#include "bore/continuation.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace bore {

std::string to_string(Direction d) { return d == Direction::minus ? "minus" : "plus"; }

std::string to_string(Termination t) {
  switch (t) {
    case Termination::none: return "none";
    case Termination::budget_exhausted: return "budget_exhausted";
    case Termination::a1_blowup: return "A1_blowup";
    case Termination::a2_heteroclinic: return "A2_heteroclinic";
    case Termination::a3_spectral: return "A3_spectral";
    case Termination::solver_failure: return "solver_failure";
  }
  return "unknown";
}

double default_truncation_length(const FluidParameters& params, double lambda) {
  const DecayRates k = decay_rates(make_mcc_state(params, lambda));
  return std::max(12.0 / k.kappa_minus, 12.0 / k.kappa_plus);
}

StripGrid build_branch_grid(const FluidParameters& params, double lambda,
                            const GridSpec& spec) {
  const double L = spec.L > 0.0 ? spec.L : default_truncation_length(params, lambda);
  return StripGrid::make(L, spec.n_q, spec.n_low, spec.n_up, lambda);
}

double metric_norm(const Eigen::VectorXd& dh, double dlambda) {
  return std::sqrt(dh.squaredNorm() / dh.size() + dlambda * dlambda);
}

Tangent normalized_tangent(Eigen::VectorXd du, double dlambda) {
  const double n = metric_norm(du, dlambda);
  if (!(n > 0.0)) throw InvalidParameterError("tangent has zero length");
  Tangent t;
  t.du = du / n;
  t.dlambda = dlambda / n;
  return t;
}

Tangent secant_tangent(const BranchPoint& prev, const BranchPoint& last) {
  return normalized_tangent(last.front.h - prev.front.h, last.lambda - prev.lambda);
}

namespace {

Eigen::VectorXd lambda_derivative_fd(const DiscreteFront& front) {
  const StripGrid& g = front.grid;
  double e = 1e-5 * std::max(1.0, std::abs(g.lambda));
  e = std::min(e, 0.4 * std::min(g.lambda, 1.0 - g.lambda));
  DiscreteFront plus = front;
  plus.grid = StripGrid::make(g.L, g.n_q, g.n_low, g.n_up, g.lambda + e);
  DiscreteFront minus = front;
  minus.grid = StripGrid::make(g.L, g.n_q, g.n_low, g.n_up, g.lambda - e);
  return (dj_residual(plus) - dj_residual(minus)) / (2.0 * e);
}

}  // namespace

Tangent initial_tangent(const ExtendedPoint& point, Direction dir) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(dj_jacobian(point.front));
  if (lu.info() != Eigen::Success) {
    throw NumericalFailureError("initial_tangent: factorization failed");
  }
  const Eigen::VectorXd du = lu.solve(-lambda_derivative_fd(point.front));
  Tangent t = normalized_tangent(du, 1.0);
  const double want = dir == Direction::minus ? -1.0 : 1.0;
  if (t.dlambda * want < 0.0) {
    t.du = -t.du;
    t.dlambda = -t.dlambda;
  }
  return t;
}

ExtendedPoint solve_bordered(const ExtendedPoint& base, const Tangent& tau, double ds,
                             double tol, int max_iter, NewtonReport* report) {
  const StripGrid& g0 = base.front.grid;
  const int n = g0.size();
  const double inv_n = 1.0 / n;

  auto make_front = [&](const Eigen::VectorXd& h, double lambda) {
    DiscreteFront f;
    f.grid = StripGrid::make(g0.L, g0.n_q, g0.n_low, g0.n_up, lambda);
    f.params = base.front.params;
    f.h = h;
    return f;
  };

  Eigen::VectorXd h = base.front.h + ds * tau.du;
  double lambda = base.lambda + ds * tau.dlambda;
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw BoundaryOfDomainError("solve_bordered: predictor left lambda in (0,1)");
  }
  DiscreteFront f = make_front(h, lambda);
  if (!stagnation_free(f)) {
    throw StagnationViolationError("solve_bordered: predictor violates h_p > 0");
  }

  NewtonReport rep;
  auto normalization = [&](const Eigen::VectorXd& hh, double ll) {
    return (hh - base.front.h).dot(tau.du) * inv_n + (ll - base.lambda) * tau.dlambda - ds;
  };

  Eigen::VectorXd F = dj_residual(f);
  double gval = normalization(f.h, lambda);
  double norm = std::max(F.lpNorm<Eigen::Infinity>(), std::abs(gval));
  rep.norms.push_back(norm);

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  int slow_streak = 0;
  for (int it = 0; it < max_iter; ++it) {
    if (norm <= tol) break;

    const Eigen::SparseMatrix<double> J = dj_jacobian(f);
    const Eigen::VectorXd Flam = lambda_derivative_fd(f);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(J.nonZeros()) + 2 * n + 1);
    for (int c = 0; c < J.outerSize(); ++c) {
      for (Eigen::SparseMatrix<double>::InnerIterator iter(J, c); iter; ++iter) {
        trip.emplace_back(static_cast<int>(iter.row()), c, iter.value());
      }
    }
    for (int i = 0; i < n; ++i) {
      if (Flam[i] != 0.0) trip.emplace_back(i, n, Flam[i]);
      if (tau.du[i] != 0.0) trip.emplace_back(n, i, tau.du[i] * inv_n);
    }
    trip.emplace_back(n, n, tau.dlambda);
    Eigen::SparseMatrix<double> B(n + 1, n + 1);
    B.setFromTriplets(trip.begin(), trip.end());

    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = -F;
    rhs[n] = -gval;
    lu.compute(B);
    if (lu.info() != Eigen::Success) {
      throw NumericalFailureError("solve_bordered: bordered factorization failed");
    }
    const Eigen::VectorXd step = lu.solve(rhs);

    double alpha = 1.0;
    bool accepted = false;
    bool any_admissible = false;
    for (int halving = 0; halving <= 8; ++halving) {
      const Eigen::VectorXd ht = f.h + alpha * step.head(n);
      const double lt = lambda + alpha * step[n];
      if (lt > 0.0 && lt < 1.0) {
        DiscreteFront trial = make_front(ht, lt);
        if (stagnation_free(trial)) {
          any_admissible = true;
          const Eigen::VectorXd Ft = dj_residual(trial);
          const double gt = normalization(ht, lt);
          const double nt = std::max(Ft.lpNorm<Eigen::Infinity>(), std::abs(gt));
          if (nt < norm || nt <= tol) {
            f = std::move(trial);
            lambda = lt;
            F = Ft;
            gval = gt;
            norm = nt;
            accepted = true;
            break;
          }
        }
      }
      alpha *= 0.5;
    }
    rep.iterations = it + 1;
    if (!accepted) {
      if (!any_admissible) {
        throw BoundaryOfDomainError("solve_bordered: no admissible step length");
      }
      char msg[96];
      std::snprintf(msg, sizeof(msg), "solve_bordered: line search stalled at residual %.3e",
                    norm);
      if (report) *report = rep;
      throw ConvergenceFailureError(msg);
    }
    slow_streak = norm > 0.9 * rep.norms.back() ? slow_streak + 1 : 0;
    rep.norms.push_back(norm);
    if (slow_streak >= 3 && norm > tol) {
      char msg[96];
      std::snprintf(msg, sizeof(msg), "solve_bordered: progress stalled at residual %.3e",
                    norm);
      if (report) *report = rep;
      throw ConvergenceFailureError(msg);
    }
  }
  rep.final_norm = norm;
  if (report) *report = rep;
  if (norm > tol) {
    char msg[96];
    std::snprintf(msg, sizeof(msg),
                  "solve_bordered: no convergence in %d iterations, residual %.3e", max_iter,
                  norm);
    throw ConvergenceFailureError(msg);
  }
  ExtendedPoint out;
  out.front = std::move(f);
  out.lambda = lambda;
  return out;
}

namespace {

// h_q is identically zero on the pinned walls (they are streamlines), so the
// strict sign condition applies to the open layers and the interface row.
bool strictly_monotone(const DiscreteFront& front, double lambda_star) {
  const StripGrid& g = front.grid;
  const double want = lambda_star - g.lambda;  // sign of h_q along the front
  if (want == 0.0) return true;
  bool all_zero = true;
  for (int j = 1; j < g.n_q - 1; ++j) {
    for (int k = 1; k < g.n_v - 1; ++k) {
      const double hq = front.at(j + 1, k) - front.at(j - 1, k);
      if (hq != 0.0) all_zero = false;
      if (hq * want < 0.0) return false;
    }
  }
  if (all_zero) return true;  // laminar: vacuously monotone
  // strictness at every interior node
  for (int j = 1; j < g.n_q - 1; ++j) {
    for (int k = 1; k < g.n_v - 1; ++k) {
      if ((front.at(j + 1, k) - front.at(j - 1, k)) * want <= 0.0) return false;
    }
  }
  return true;
}

}  // namespace

Diagnostics compute_diagnostics(const DiscreteFront& front) {
  const StripGrid& g = front.grid;
  Diagnostics d;
  const PhysicalFields phys = reconstruct_physical(front);
  d.amplitude = phys.eta.cwiseAbs().maxCoeff();
  d.stagnation_margin = stagnation_margin(front);
  d.max_slope = phys.eta_x.cwiseAbs().maxCoeff();
  d.contact_margin = 1.0 - g.lambda;
  d.sigma_up =
      principal_eigenvalue(upstream_problem(front.params, g.lambda, g.n_low, g.n_up)).sigma;
  d.sigma_down =
      principal_eigenvalue(downstream_problem(front.params, g.lambda, g.n_low, g.n_up)).sigma;
  d.monotone = strictly_monotone(front, front.params.lambda_star);
  return d;
}

Theorem1Report theorem1_report(const BranchPoint& point) {
  const DiscreteFront& front = point.front;
  const StripGrid& g = front.grid;
  Theorem1Report rep;
  rep.monotone = strictly_monotone(front, front.params.lambda_star) && stagnation_free(front);
  rep.stagnation_margin = stagnation_margin(front);
  double dist = 0.0;
  for (int k = 0; k < g.n_v; ++k) {
    dist = std::max(dist, std::abs(front.at(1, k) - g.p[k]));
  }
  rep.laminar_distance = dist;
  return rep;
}

namespace {

BranchPoint admit_point(const ExtendedPoint& ep, double s, const NewtonReport& rep) {
  BranchPoint pt;
  pt.front = ep.front;
  pt.lambda = ep.lambda;
  pt.s = s;
  pt.diag = compute_diagnostics(ep.front);
  pt.newton_iterations = rep.iterations;
  pt.residual_norm = rep.final_norm;
  return pt;
}

}  // namespace

Branch start_branch(const FluidParameters& params, Direction dir, double delta_lambda0,
                    const GridSpec& grid, const ContinuationOptions& opts) {
  Branch branch;
  branch.direction = dir;
  branch.lambda_star = params.lambda_star;
  branch.current_ds = opts.ds0;
  branch.fast_streak = 0;

  const double d0 = delta_lambda0 > 0.0 ? delta_lambda0 : 0.02 * params.lambda_star;
  if (!(delta_lambda0 >= 0.0) || d0 <= 0.0) {
    throw OnsetFailureError("start_branch: delta_lambda0 must be positive");
  }
  const double lambda1 =
      dir == Direction::minus ? params.lambda_star - d0 : params.lambda_star + d0;
  if (!(lambda1 > 0.0 && lambda1 < 1.0)) {
    throw OnsetFailureError("start_branch: starting lambda outside (0,1)");
  }

  try {
    const StripGrid g = build_branch_grid(params, lambda1, grid);
    const DiscreteFront seed = seed_from_mcc(params, lambda1, g);
    NewtonReport rep;
    const DiscreteFront corrected =
        newton_solve(seed, opts.newton_tol, opts.newton_max_iter, &rep);

    Eigen::VectorXd u = corrected.h;
    for (int j = 0; j < g.n_q; ++j)
      for (int k = 0; k < g.n_v; ++k) u[g.index(j, k)] -= g.p[k];
    const double s1 = metric_norm(u, lambda1 - params.lambda_star);

    ExtendedPoint ep;
    ep.front = corrected;
    ep.lambda = lambda1;
    BranchPoint pt = admit_point(ep, s1, rep);
    if (!pt.diag.monotone) {
      throw OnsetFailureError("start_branch: corrected seed is not strictly monotone");
    }
    if (!(pt.diag.sigma_up < 0.0 && pt.diag.sigma_down < 0.0)) {
      throw OnsetFailureError("start_branch: transversal eigenvalues not negative at onset");
    }
    branch.points.push_back(std::move(pt));
  } catch (const OnsetFailureError&) {
    throw;
  } catch (const Error& e) {
    throw OnsetFailureError(std::string("start_branch failed (try a smaller delta_lambda0): ") +
                            e.what());
  }
  return branch;
}

bool arclength_step(Branch& branch, const ContinuationOptions& opts) {
  if (branch.points.empty()) {
    throw InvalidParameterError("arclength_step: branch has no points");
  }
  if (branch.termination != Termination::none) return false;

  const BranchPoint& last = branch.points.back();
  ExtendedPoint base;
  base.front = last.front;
  base.lambda = last.lambda;

  Tangent tau;
  if (branch.points.size() >= 2) {
    tau = secant_tangent(branch.points[branch.points.size() - 2], last);
  } else {
    tau = initial_tangent(base, branch.direction);
  }

  double ds = branch.current_ds;
  while (true) {
    try {
      NewtonReport rep;
      ExtendedPoint next =
          solve_bordered(base, tau, ds, opts.newton_tol, opts.newton_max_iter, &rep);

      const double s_new =
          last.s + metric_norm(next.front.h - last.front.h, next.lambda - last.lambda);
      BranchPoint pt = admit_point(next, s_new, rep);

      const double rel = (pt.lambda - branch.lambda_star) *
                         (branch.direction == Direction::minus ? -1.0 : 1.0);
      if (rel <= 0.0) {
        branch.log.push_back("abort: lambda crossed lambda_star at step " +
                             std::to_string(branch.points.size()));
        branch.termination = Termination::solver_failure;
        return false;
      }
      if (!pt.diag.monotone) {
        branch.log.push_back("admission refused (monotonicity) at lambda=" +
                             std::to_string(pt.lambda) + ", ds=" + std::to_string(ds));
        ds *= 0.5;
        if (ds < opts.ds_min) {
          branch.termination = Termination::solver_failure;
          return false;
        }
        continue;
      }

      branch.points.push_back(std::move(pt));
      if (rep.iterations <= 4) {
        if (++branch.fast_streak >= 3) {
          ds = std::min(2.0 * ds, opts.ds_max);
          branch.fast_streak = 0;
        }
      } else {
        branch.fast_streak = 0;
      }
      branch.current_ds = ds;
      return true;
    } catch (const Error& e) {
      branch.log.push_back(std::string("step failed at ds=") + std::to_string(ds) + ": " +
                           e.what());
      ds *= 0.5;
      branch.fast_streak = 0;
      if (ds < opts.ds_min) {
        branch.termination = Termination::solver_failure;
        branch.current_ds = ds;
        return false;
      }
    }
  }
}

Termination classify_alternative(const Branch& branch, const Thresholds& thr) {
  if (branch.points.empty()) return Termination::none;
  const BranchPoint& pt = branch.points.back();
  const Diagnostics& d = pt.diag;

  const double norm_proxy = pt.front.h.cwiseAbs().maxCoeff() + std::abs(pt.lambda);
  if (d.stagnation_margin < thr.eps_stag || d.max_slope > thr.max_slope ||
      d.contact_margin < thr.eps_contact || norm_proxy > thr.norm_max) {
    return Termination::a1_blowup;
  }

  if (std::abs(pt.lambda - branch.lambda_star) > thr.onset_exclusion &&
      std::min(std::abs(d.sigma_up), std::abs(d.sigma_down)) < thr.eps_spec) {
    return Termination::a3_spectral;
  }

  // A2: an interior plateau of eta between two transition layers
  const PhysicalFields phys = reconstruct_physical(pt.front);
  const int nq = pt.front.grid.n_q;
  const double amp = phys.eta.cwiseAbs().maxCoeff();
  if (amp > 0.0 && nq > 4) {
    std::vector<double> slope(nq - 2);
    double max_slope = 0.0;
    for (int j = 1; j < nq - 1; ++j) {
      slope[j - 1] = std::abs(phys.eta_x[j]);
      max_slope = std::max(max_slope, slope[j - 1]);
    }
    const double flat = thr.eps_plateau * amp;
    const double transition = 0.5 * max_slope;
    int run_start = -1;
    for (int i = 0; i <= static_cast<int>(slope.size()); ++i) {
      const bool in_run = i < static_cast<int>(slope.size()) && slope[i] < flat;
      if (in_run && run_start < 0) run_start = i;
      if (!in_run && run_start >= 0) {
        const int run_len = i - run_start;
        if (run_len >= thr.plateau_width_cells) {
          bool left = false, right = false;
          for (int l = 0; l < run_start; ++l) left = left || slope[l] >= transition;
          for (int r = i; r < static_cast<int>(slope.size()); ++r)
            right = right || slope[r] >= transition;
          if (left && right) return Termination::a2_heteroclinic;
        }
        run_start = -1;
      }
    }
  }
  return Termination::none;
}

Branch run_branch(const FluidParameters& params, Direction dir, const GridSpec& grid,
                  const ContinuationOptions& opts) {
  Thresholds thr = opts.thresholds;
  const double d0 =
      opts.delta_lambda0 > 0.0 ? opts.delta_lambda0 : 0.02 * params.lambda_star;
  if (thr.onset_exclusion <= 0.0) thr.onset_exclusion = d0;

  Branch branch = start_branch(params, dir, opts.delta_lambda0, grid, opts);
  Termination tag = classify_alternative(branch, thr);
  if (tag != Termination::none) {
    branch.termination = tag;
    return branch;
  }
  for (int step = 0; step < opts.steps; ++step) {
    if (!arclength_step(branch, opts)) return branch;
    tag = classify_alternative(branch, thr);
    if (tag != Termination::none) {
      branch.termination = tag;
      return branch;
    }
  }
  branch.termination = Termination::budget_exhausted;
  return branch;
}

}  // namespace bore
