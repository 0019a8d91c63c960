#include "bore/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <cmath>
#include <random>
#include <string>

namespace bore {

namespace {

// s_mu(t): solution of v'' = mu v with v(0)=0, v'(0)=1; c_mu(t) = s_mu'(t).
double s_mu(double mu, double t) {
  if (mu == 0.0) return t;
  const double x = std::sqrt(std::abs(mu));
  return mu > 0.0 ? std::sinh(x * t) / x : std::sin(x * t) / x;
}

double c_mu(double mu, double t) {
  if (mu == 0.0) return 1.0;
  const double x = std::sqrt(std::abs(mu));
  return mu > 0.0 ? std::cosh(x * t) : std::cos(x * t);
}

void validate(const TransversalProblem& pb) {
  if (pb.n_low < 3 || pb.n_up < 3) {
    throw InvalidParameterError("transversal problem needs >= 3 nodes per layer");
  }
  if (!(pb.lambda > 0.0 && pb.lambda < 1.0)) {
    throw InvalidParameterError("transversal problem: lambda outside (0,1)");
  }
  if (!(pb.lower_slope > 0.0) || !(pb.upper_slope > 0.0)) {
    throw InvalidParameterError("transversal problem: slopes must be positive");
  }
}

}  // namespace

TransversalProblem upstream_problem(const FluidParameters& params, double lambda,
                                    int n_low, int n_up) {
  TransversalProblem pb;
  pb.params = params;
  pb.lambda = lambda;
  pb.lower_slope = 1.0;
  pb.upper_slope = 1.0;
  pb.n_low = n_low;
  pb.n_up = n_up;
  validate(pb);
  return pb;
}

TransversalProblem downstream_problem(const FluidParameters& params, double lambda,
                                      int n_low, int n_up) {
  const LaminarState down = downstream_state(params, lambda);
  TransversalProblem pb;
  pb.params = params;
  pb.lambda = lambda;
  pb.lower_slope = down.lower_slope;
  pb.upper_slope = down.upper_slope;
  pb.n_low = n_low;
  pb.n_up = n_up;
  validate(pb);
  return pb;
}

EigenResult principal_eigenvalue(const TransversalProblem& pb) {
  validate(pb);
  const double lam = pb.lambda;
  const double d1 = lam / (pb.n_low - 1);
  const double d2 = (1.0 - lam) / (pb.n_up - 1);
  const double m1 = pb.lower_slope;
  const double m2 = pb.upper_slope;
  const int K = pb.n_low - 1;       // interface node in full numbering
  const int nv = pb.n_low + pb.n_up - 1;

  // interface constraint: a(3 vK - 4 vK-1 + vK-2) + b(3 vK - 4 vK+1 + vK+2)
  //                       + jump(rho)/F^2 vK = 0
  const double a = pb.params.rho1 / (m1 * m1 * m1 * 2.0 * d1);
  const double b = pb.params.rho2 / (m2 * m2 * m2 * 2.0 * d2);
  const double cK = 3.0 * (a + b) + pb.params.density_jump() / pb.params.froude_sq;
  if (std::abs(cK) < 1e-12 * (a + b)) {
    throw NumericalFailureError("transversal pencil: interface pivot vanished");
  }
  // v_K = sum of elim[k] * v_k over the four neighbors (walls contribute 0)
  auto elim_coeff = [&](int k) -> double {
    if (k == K - 1) return 4.0 * a / cK;
    if (k == K - 2) return -a / cK;
    if (k == K + 1) return 4.0 * b / cK;
    if (k == K + 2) return -b / cK;
    return 0.0;
  };

  // reduced unknowns: lower interior 1..K-1, upper interior K+1..nv-2
  const int M = (pb.n_low - 2) + (pb.n_up - 2);
  auto reduced_index = [&](int k) -> int {
    if (k <= 0 || k == K || k >= nv - 1) return -1;
    return k < K ? k - 1 : (pb.n_low - 2) + (k - K - 1);
  };

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, M);
  auto add_entry = [&](int row, int k, double v) {
    if (k <= 0 || k >= nv - 1) return;  // wall values are zero
    if (k == K) {
      for (int kk : {K - 2, K - 1, K + 1, K + 2}) {
        const int c = reduced_index(kk);
        if (c >= 0) A(row, c) += v * elim_coeff(kk);
      }
      return;
    }
    A(row, reduced_index(k)) += v;
  };

  for (int k = 1; k < nv - 1; ++k) {
    if (k == K) continue;
    const bool lower = k < K;
    const double dp = lower ? d1 : d2;
    const double w = 1.0 / (dp * dp * (lower ? m1 * m1 : m2 * m2));
    const int row = reduced_index(k);
    add_entry(row, k - 1, w);
    add_entry(row, k, -2.0 * w);
    add_entry(row, k + 1, w);
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) {
    throw NumericalFailureError("transversal pencil: eigensolver failed");
  }
  int best = -1;
  for (int i = 0; i < M; ++i) {
    if (best < 0 || es.eigenvalues()[i].real() > es.eigenvalues()[best].real()) best = i;
  }
  const std::complex<double> sig = es.eigenvalues()[best];
  if (std::abs(sig.imag()) > 1e-8 * (1.0 + std::abs(sig.real()))) {
    throw NumericalFailureError("transversal pencil: rightmost eigenvalue is not real");
  }

  EigenResult out;
  out.sigma = sig.real();
  out.eigenfunction = Eigen::VectorXd::Zero(nv);
  for (int k = 1; k < nv - 1; ++k) {
    if (k == K) continue;
    out.eigenfunction[k] = es.eigenvectors().col(best)[reduced_index(k)].real();
  }
  double vK = 0.0;
  for (int kk : {K - 2, K - 1, K + 1, K + 2}) {
    if (kk > 0 && kk < nv - 1) vK += elim_coeff(kk) * out.eigenfunction[kk];
  }
  out.eigenfunction[K] = vK;
  // principal eigenfunction is one-signed; normalize it positive with max 1
  if (out.eigenfunction.sum() < 0.0) out.eigenfunction = -out.eigenfunction;
  const double mx = out.eigenfunction.cwiseAbs().maxCoeff();
  if (mx > 0.0) out.eigenfunction /= mx;
  return out;
}

double characteristic_oracle(const TransversalProblem& pb, double sigma) {
  validate(pb);
  const double lam = pb.lambda;
  const double m1 = pb.lower_slope;
  const double m2 = pb.upper_slope;
  const double mu1 = sigma * m1 * m1;
  const double mu2 = sigma * m2 * m2;
  const double s1 = s_mu(mu1, lam), c1 = c_mu(mu1, lam);
  const double s2 = s_mu(mu2, 1.0 - lam), c2 = c_mu(mu2, 1.0 - lam);
  return pb.params.rho2 / (m2 * m2 * m2) * s1 * c2 +
         pb.params.rho1 / (m1 * m1 * m1) * s2 * c1 +
         pb.params.density_jump() / pb.params.froude_sq * s1 * s2;
}

double characteristic_root(const TransversalProblem& pb) {
  validate(pb);
  const double lam = pb.lambda;
  const double pi = 3.14159265358979323846;
  const double wall1 = std::pow(pi / (pb.lower_slope * lam), 2);
  const double wall2 = std::pow(pi / (pb.upper_slope * (1.0 - lam)), 2);
  const double floor = -std::min(wall1, wall2);
  const double hi = 10.0;
  const int steps = 20000;
  double prev_s = hi;
  double prev_f = characteristic_oracle(pb, hi);
  double lo = 0.0, up = 0.0;
  bool found = false;
  for (int i = 1; i <= steps; ++i) {
    const double s = hi + (floor - hi) * static_cast<double>(i) / steps;
    const double f = characteristic_oracle(pb, s);
    if (f == 0.0) return s;
    if (prev_f * f < 0.0) {
      lo = s;
      up = prev_s;
      found = true;
      break;
    }
    prev_s = s;
    prev_f = f;
  }
  if (!found) {
    throw NumericalFailureError("characteristic_root: no sign change above the wall modes");
  }
  double flo = characteristic_oracle(pb, lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + up);
    const double fm = characteristic_oracle(pb, mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      up = mid;
    } else {
      lo = mid;
      flo = fm;
    }
    if (up - lo < 1e-15 * (1.0 + std::abs(lo))) break;
  }
  return 0.5 * (lo + up);
}

KernelProxyReport kernel_proxy(const DiscreteFront& front,
                               const Eigen::SparseMatrix<double>& jacobian) {
  const int n = static_cast<int>(jacobian.rows());
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu, lut;
  lu.compute(jacobian);
  Eigen::SparseMatrix<double> jt = jacobian.transpose();
  lut.compute(jt);
  if (lu.info() != Eigen::Success || lut.info() != Eigen::Success) {
    throw NumericalFailureError("kernel_proxy: factorization failed");
  }

  std::mt19937 rng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd X(n, 2);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = gauss(rng);

  auto apply = [&](const Eigen::VectorXd& x) {
    // (J^T J)^{-1} x = J^{-1} (J^{-T} x)
    return Eigen::VectorXd(lu.solve(lut.solve(x)));
  };

  Eigen::Vector2d ritz = Eigen::Vector2d::Zero();
  for (int it = 0; it < 300; ++it) {
    Eigen::MatrixXd Y(n, 2);
    Y.col(0) = apply(X.col(0));
    Y.col(1) = apply(X.col(1));
    // orthonormalize
    Y.col(0).normalize();
    Y.col(1) -= Y.col(0).dot(Y.col(1)) * Y.col(0);
    Y.col(1).normalize();
    Eigen::Matrix2d P;
    Eigen::MatrixXd AY(n, 2);
    AY.col(0) = apply(Y.col(0));
    AY.col(1) = apply(Y.col(1));
    P = Y.transpose() * AY;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> se(0.5 * (P + P.transpose()));
    Eigen::Vector2d mu = se.eigenvalues().reverse();  // descending
    Eigen::Matrix2d V = se.eigenvectors().rowwise().reverse();
    X = Y * V;
    const double change = (mu - ritz).cwiseAbs().maxCoeff() /
                          std::max(1e-300, mu.cwiseAbs().maxCoeff());
    ritz = mu;
    if (it > 4 && change < 1e-10) break;
  }

  KernelProxyReport rep;
  rep.smallest = 1.0 / std::sqrt(std::max(ritz[0], 1e-300));
  rep.second_smallest = 1.0 / std::sqrt(std::max(ritz[1], 1e-300));
  rep.gap_ratio = rep.second_smallest / rep.smallest;
  rep.null_vector = X.col(0);
  (void)front;
  return rep;
}

Eigen::VectorXd translation_mode(const DiscreteFront& front) {
  const StripGrid& g = front.grid;
  Eigen::VectorXd t = Eigen::VectorXd::Zero(g.size());
  for (int j = 1; j < g.n_q - 1; ++j) {
    for (int k = 0; k < g.n_v; ++k) {
      t[g.index(j, k)] = (front.at(j + 1, k) - front.at(j - 1, k)) / (2.0 * g.dq);
    }
  }
  const double nrm = t.norm();
  if (nrm > 0.0) t /= nrm;
  return t;
}

}  // namespace bore
