#pragma once

#include <string>
#include <vector>

#include "bore/dj_solver.hpp"
#include "bore/spectral.hpp"

namespace bore {

enum class Direction { minus, plus };  // C-: lambda < lambda*, C+: lambda > lambda*

enum class Termination {
  none,
  budget_exhausted,
  a1_blowup,
  a2_heteroclinic,
  a3_spectral,
  solver_failure,
};

std::string to_string(Direction d);
std::string to_string(Termination t);

struct Thresholds {
  double eps_stag = 1e-2;      // stagnation margin floor (A1)
  double max_slope = 10.0;     // |eta_x| overturning proxy (A1)
  double eps_contact = 1e-2;   // upper-layer thickness floor (A1)
  double eps_spec = 1e-3;      // |sigma| floor away from onset (A3)
  double eps_plateau = 1e-2;   // |eta_q| < eps_plateau * amplitude marks a plateau (A2)
  int plateau_width_cells = 10;
  double norm_max = 1e3;       // max|h| + |lambda| blowup proxy (A1)
  double onset_exclusion = 0.0;  // |lambda - lambda*| below this suppresses A3
};

struct Diagnostics {
  double amplitude = 0.0;          // max |eta|
  double stagnation_margin = 0.0;  // min over interface, both sides, of 1/h_p
  double max_slope = 0.0;          // max |eta_x|
  double sigma_up = 0.0;           // principal eigenvalue, upstream laminar state
  double sigma_down = 0.0;         // principal eigenvalue, downstream laminar state
  double contact_margin = 0.0;     // 1 - lambda
  bool monotone = false;
};

struct BranchPoint {
  DiscreteFront front;
  double lambda = 0.0;
  double s = 0.0;  // accumulated pseudo-arclength
  Diagnostics diag;
  int newton_iterations = 0;
  double residual_norm = 0.0;
};

struct Branch {
  Direction direction = Direction::minus;
  double lambda_star = 0.0;
  std::vector<BranchPoint> points;
  Termination termination = Termination::none;
  double current_ds = 0.0;
  int fast_streak = 0;
  std::vector<std::string> log;  // admission refusals, step halvings, aborts
};

struct GridSpec {
  double L = 0.0;  // 0: use max(12/kappa-, 12/kappa+) at the starting lambda
  int n_q = 401;
  int n_low = 41;
  int n_up = 41;
};

struct ContinuationOptions {
  double ds0 = 0.02;
  double ds_min = 1e-5;
  double ds_max = 0.1;
  int steps = 30;
  double newton_tol = 1e-8;
  int newton_max_iter = 50;
  double delta_lambda0 = 0.0;  // 0: default 0.02 * lambda_star
  Thresholds thresholds;
};

// max(12/kappa-, 12/kappa+) at the given lambda.
double default_truncation_length(const FluidParameters& params, double lambda);

StripGrid build_branch_grid(const FluidParameters& params, double lambda,
                            const GridSpec& spec);

// --- bordered pseudo-arclength machinery -----------------------------------

struct ExtendedPoint {
  DiscreteFront front;
  double lambda = 0.0;
};

struct Tangent {
  Eigen::VectorXd du;
  double dlambda = 0.0;
};

// sqrt( mean(dh^2) + dlambda^2 ): lambda and the field enter on equal footing.
double metric_norm(const Eigen::VectorXd& dh, double dlambda);

Tangent normalized_tangent(Eigen::VectorXd du, double dlambda);
Tangent secant_tangent(const BranchPoint& prev, const BranchPoint& last);

// First-step tangent from the lambda-derivative direction: J du = -F_lambda,
// oriented so dlambda has the sign of the branch direction.
Tangent initial_tangent(const ExtendedPoint& point, Direction dir);

// One bordered Newton solve of {dj_residual = 0, <u-u0, tau_u> + (lambda-lambda0)
// tau_lambda = ds}; the predictor is base + ds*tau.
ExtendedPoint solve_bordered(const ExtendedPoint& base, const Tangent& tau, double ds,
                             double tol, int max_iter, NewtonReport* report = nullptr);

// --- diagnostics and admission ----------------------------------------------

Diagnostics compute_diagnostics(const DiscreteFront& front);

struct Theorem1Report {
  bool monotone = false;          // all three sign conditions at every node
  double stagnation_margin = 0.0;
  double laminar_distance = 0.0;  // deviation of the first interior column
};

Theorem1Report theorem1_report(const BranchPoint& point);

// --- branch drivers ----------------------------------------------------------

Branch start_branch(const FluidParameters& params, Direction dir, double delta_lambda0,
                    const GridSpec& grid, const ContinuationOptions& opts);

// Advances the branch by one admitted point (with internal ds halving on
// failure). Returns false when the branch terminated instead.
bool arclength_step(Branch& branch, const ContinuationOptions& opts);

// First matching alternative for the branch's last point: A1, then A3
// (suppressed within onset_exclusion of lambda*), then the A2 interior-plateau
// detector; Termination::none otherwise.
Termination classify_alternative(const Branch& branch, const Thresholds& thresholds);

// start_branch + steps, classifying after every point.
Branch run_branch(const FluidParameters& params, Direction dir, const GridSpec& grid,
                  const ContinuationOptions& opts);

}  // namespace bore
