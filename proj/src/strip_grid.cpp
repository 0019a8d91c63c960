#include "bore/strip_grid.hpp"

#include <string>

namespace bore {

StripGrid StripGrid::make(double L, int n_q, int n_low, int n_up, double lambda) {
  if (!(L > 0.0)) throw InvalidParameterError("grid: L must be positive");
  if (n_q < 3 || n_q % 2 == 0) throw InvalidParameterError("grid: n_q must be odd and >= 3");
  if (n_low < 3 || n_up < 3) throw InvalidParameterError("grid: n_low, n_up must be >= 3");
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidParameterError("grid: lambda must lie in (0,1)");

  StripGrid g;
  g.L = L;
  g.n_q = n_q;
  g.n_low = n_low;
  g.n_up = n_up;
  g.lambda = lambda;
  g.dq = 2.0 * L / (n_q - 1);
  g.dp_low = lambda / (n_low - 1);
  g.dp_up = (1.0 - lambda) / (n_up - 1);
  g.n_v = n_low + n_up - 1;
  g.interface_k = n_low - 1;

  g.p.resize(g.n_v);
  for (int k = 0; k < n_low; ++k) g.p[k] = -lambda + g.dp_low * k;
  for (int i = 1; i < n_up; ++i) g.p[g.interface_k + i] = g.dp_up * i;
  // pin the rows carrying Dirichlet data exactly
  g.p[0] = -lambda;
  g.p[g.interface_k] = 0.0;
  g.p[g.n_v - 1] = 1.0 - lambda;
  return g;
}

RowKind row_kind(const StripGrid& grid, int j, int k) {
  if (j == 0 || j == grid.n_q - 1) return RowKind::Lateral;
  if (k == 0) return RowKind::Bottom;
  if (k == grid.n_v - 1) return RowKind::Top;
  if (k == grid.interface_k) return RowKind::Interface;
  return grid.is_lower(k) ? RowKind::InteriorLower : RowKind::InteriorUpper;
}

}  // namespace bore
