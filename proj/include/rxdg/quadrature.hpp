#pragma once

#include <vector>

#include "rxdg/state.hpp"

namespace rxdg::quad {

/// Points in reference coordinates, strictly positive weights.
/// Weights sum to the reference measure.
struct QuadratureRule {
  int dim = 0;
  std::vector<Real> points;   // npts * dim, point-major
  std::vector<Real> weights;

  int npts() const { return static_cast<int>(weights.size()); }
  Real pt(int q, int k) const { return points[q * dim + k]; }
  Real weight_sum() const;
};

/// Gauss-Legendre on [-1, 1]; exact for degree 2n-1.
QuadratureRule gauss_legendre(int n);

/// Gauss-Lobatto on [-1, 1] (includes endpoints); exact for degree 2n-3.
QuadratureRule gauss_lobatto(int n);

/// Symmetric positive-weight rule on the unit right triangle
/// {(0,0),(1,0),(0,1)}; exact at least to the requested order.
QuadratureRule triangle_rule(int order);

/// Collapsed-coordinate tensor rule on the unit triangle; positive weights
/// at any order. Used for refined oracles and strongly curved elements.
QuadratureRule triangle_collapsed_rule(int order);

/// Tensor Gauss-Legendre on the bi-unit square [-1,1]^2.
QuadratureRule quad_rule(int order);

/// Tensor Gauss-Lobatto on the bi-unit square (n points per direction).
QuadratureRule quad_lobatto_rule(int n_per_dir);

/// Gauss-Legendre on [-1, 1] as a dim-1 rule.
QuadratureRule line_rule(int order);

/// Single-point "rule" for the faces of 1D elements.
QuadratureRule point_rule();

} // namespace rxdg::quad
