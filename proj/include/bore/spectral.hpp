#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "bore/conjugate_flow.hpp"
#include "bore/dj_solver.hpp"

namespace bore {

// Linearization of the transformed system about a laminar state, restricted
// to x-independent perturbations w(p):
//   interior rows      w_pp = sigma * m_i^2 * w     (m_i = laminar slope h_p)
//   walls              w = 0
//   interface row      -[rho m^-3 w_p]_jump + jump(rho)/F^2 w(0) = 0
// The m_i^2 weight makes sigma = -k^2 for the axial modes e^{ikx} of the
// linearized cylinder problem, so sigma crossing 0 is exactly the loss of
// Fredholmness at the corresponding asymptotic state.
struct TransversalProblem {
  FluidParameters params;
  double lambda = 0.0;
  double lower_slope = 1.0;
  double upper_slope = 1.0;
  int n_low = 0;  // vertical nodes per layer, interface shared (matches StripGrid columns)
  int n_up = 0;
};

TransversalProblem upstream_problem(const FluidParameters& params, double lambda,
                                    int n_low, int n_up);
TransversalProblem downstream_problem(const FluidParameters& params, double lambda,
                                      int n_low, int n_up);

struct EigenResult {
  double sigma = 0.0;
  Eigen::VectorXd eigenfunction;  // all vertical nodes including the zero walls
};

// Rightmost eigenvalue of the discrete pencil (walls eliminated, the
// sigma-free interface row eliminates the interface unknown).
EigenResult principal_eigenvalue(const TransversalProblem& problem);

// Closed-form shooting verification: solves w'' = sigma m^2 w per layer with
// trig/hyperbolic functions meeting the Dirichlet walls and returns the
// transmission-row mismatch. Its rightmost root is the continuum eigenvalue.
double characteristic_oracle(const TransversalProblem& problem, double sigma);

// Rightmost root of the characteristic function (downward scan + bisection).
double characteristic_root(const TransversalProblem& problem);

struct KernelProxyReport {
  double smallest = 0.0;         // smallest singular value of the Jacobian
  double second_smallest = 0.0;
  double gap_ratio = 0.0;        // second/smallest
  Eigen::VectorXd null_vector;   // right singular vector of the smallest value
};

// Smallest two singular values of a front Jacobian by block inverse
// iteration. Diagnostic proxy for the one-dimensional-kernel hypothesis: on a
// truncated cylinder the translation mode gives a small-but-nonzero first
// value, and the gap ratio to the second reports how isolated it is.
KernelProxyReport kernel_proxy(const DiscreteFront& front,
                               const Eigen::SparseMatrix<double>& jacobian);

// Discrete translation mode h_q (zero on the lateral Dirichlet columns),
// normalized; the kernel proxy's null vector should align with it.
Eigen::VectorXd translation_mode(const DiscreteFront& front);

}  // namespace bore
