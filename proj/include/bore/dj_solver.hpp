#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <vector>

#include "bore/conjugate_flow.hpp"
#include "bore/mcc_model.hpp"
#include "bore/strip_grid.hpp"

namespace bore {

// Height function y = h(q, p) sampled on a StripGrid, h stored row-major per
// axial column (index = j*n_v + k). The upstream laminar solution is h = p.
struct DiscreteFront {
  StripGrid grid;
  FluidParameters params;
  Eigen::VectorXd h;

  double& at(int j, int k) { return h[grid.index(j, k)]; }
  double at(int j, int k) const { return h[grid.index(j, k)]; }
};

// Exact laminar fronts. Both are built so that their residual vanishes to
// rounding: the upstream front is bitwise equal to the grid coordinates.
DiscreteFront laminar_front(const FluidParameters& params, const StripGrid& grid);
DiscreteFront conjugate_front(const FluidParameters& params, const StripGrid& grid);

// Downstream laminar column (the q = +L Dirichlet data).
Eigen::VectorXd downstream_column(const FluidParameters& params, const StripGrid& grid);

// Initial guess built by vertically rescaling laminar streamlines through the
// long-wave interface zeta(q); h(q, 0) equals zeta(q) exactly.
DiscreteFront seed_from_mcc(const FluidParameters& params, double lambda, const StripGrid& grid);

// True if every within-layer vertical increment of h and every one-sided
// interface stencil is positive (no horizontal stagnation).
bool stagnation_free(const DiscreteFront& front);

// min over interface nodes, both one-sided stencils, of 1/h_p (= |psi_y|).
double stagnation_margin(const DiscreteFront& front);

// One-sided interface derivatives h_p for every axial node: first = from the
// lower layer, second = from the upper layer.
std::pair<Eigen::VectorXd, Eigen::VectorXd> interface_slopes(const DiscreteFront& front);

// Residual of the transformed system. Interior rows carry the quasilinear
// operator (1+h_q^2)h_pp - 2 h_q h_p h_qp + h_p^2 h_qq scaled by the layer's
// dp^2 (so exact laminar data evaluates to hard zeros); the interface row is
// the unscaled dynamic condition; boundary rows are Dirichlet differences.
// Throws StagnationViolationError if h_p <= 0 anywhere.
Eigen::VectorXd dj_residual(const DiscreteFront& front);

// Sup-norm of the residual over the equation rows only (interior, interface,
// top/bottom walls). The lateral columns q = +-L carry the truncation closure
// data, so on an exact laminar flow they report its distance from that data,
// not an equation defect.
double equation_residual_norm(const DiscreteFront& front);

// Exact partial derivatives of dj_residual w.r.t. the h unknowns
// (9-point stencil; the interface row couples both one-sided stencils).
Eigen::SparseMatrix<double> dj_jacobian(const DiscreteFront& front);

struct NewtonReport {
  int iterations = 0;
  double final_norm = 0.0;
  std::vector<double> norms;  // residual sup-norm before each iteration + final
};

// Damped Newton with step halving (at most 8 halvings), keeping h_p > 0 at
// every iterate. Throws ConvergenceFailureError after max_iter iterations or
// a stalled line search, BoundaryOfDomainError when no admissible step length
// exists, StagnationViolationError if the guess itself is inadmissible.
DiscreteFront newton_solve(const DiscreteFront& guess, double tol, int max_iter = 50,
                           NewtonReport* report = nullptr);

// Physical-variable samples: eta = interface trace, psi_y = -1/h_p,
// psi_x = h_q/h_p. The interface rows of psi_x/psi_y use the lower-side h_p.
struct PhysicalFields {
  Eigen::VectorXd eta;    // size n_q
  Eigen::VectorXd eta_x;  // centered differences, one-sided at the ends
  Eigen::MatrixXd psi_x;  // n_q x n_v
  Eigen::MatrixXd psi_y;  // n_q x n_v
};

PhysicalFields reconstruct_physical(const DiscreteFront& front);

}  // namespace bore
