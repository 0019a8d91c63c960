#pragma once

#include <Eigen/Core>

#include "bore/errors.hpp"

namespace bore {

// Two fixed strips of the transformed (height-function) problem: the lower
// layer maps to p in [-lambda, 0], the upper layer to p in [0, 1-lambda],
// with the interface row p = 0 stored once. Axial nodes q_j are uniform on
// [-L, L] with n_q odd so that q = 0 is a node.
struct StripGrid {
  double L = 0.0;
  int n_q = 0;
  int n_low = 0;
  int n_up = 0;
  double lambda = 0.0;

  double dq = 0.0;
  double dp_low = 0.0;
  double dp_up = 0.0;
  int n_v = 0;        // vertical nodes per column, interface shared
  int interface_k = 0;

  Eigen::VectorXd p;  // vertical coordinates, size n_v

  static StripGrid make(double L, int n_q, int n_low, int n_up, double lambda);

  double q(int j) const { return -L + dq * j; }
  int index(int j, int k) const { return j * n_v + k; }
  int size() const { return n_q * n_v; }

  // Layer spacing for the vertical stencil at row k (k must not be the
  // interface row, where one-sided stencils from both layers are used).
  double dp_at(int k) const { return k < interface_k ? dp_low : dp_up; }

  bool is_lower(int k) const { return k < interface_k; }
};

enum class RowKind { Lateral, Bottom, Top, Interface, InteriorLower, InteriorUpper };

RowKind row_kind(const StripGrid& grid, int j, int k);

}  // namespace bore
