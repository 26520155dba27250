#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "rxdg/state.hpp"

namespace rxdg::basis {

enum class Shape { line, triangle, quadrilateral, tetrahedron };

int shape_dim(Shape s);

/// Lagrange basis on a fixed node set of the reference element, backed by a
/// generalized Vandermonde factorization. Immutable and shareable.
class NodalBasis {
public:
  /// Solution basis: Gauss-Lobatto nodes on lines/quads, uniform lattice on
  /// triangles. degree >= 0.
  static NodalBasis solution(Shape shape, int degree);

  /// Geometry basis with gmsh node ordering (corners, edge midpoints, center).
  /// degree 1 or 2.
  static NodalBasis geometry(Shape shape, int degree);

  /// Lagrange basis on caller-provided nodes (reference coordinates,
  /// point-major). Spans the same polynomial space as solution(shape, degree).
  static NodalBasis on_nodes(Shape shape, int degree, std::vector<Real> nodes);

  Shape shape() const { return shape_; }
  int degree() const { return degree_; }
  int dim() const { return shape_dim(shape_); }
  int n_basis() const { return n_basis_; }
  const std::vector<Real>& nodes() const { return nodes_; }
  Real node(int j, int k) const { return nodes_[j * dim() + k]; }

  /// All basis values at a reference point.
  void eval(const Real* xi, Real* phi) const;
  /// All reference-space gradients at a point; dphi is n_basis x dim,
  /// basis-major.
  void eval_grad(const Real* xi, Real* dphi) const;

  Eigen::VectorXd eval(const Real* xi) const;

private:
  NodalBasis(Shape shape, int degree, std::vector<Real> nodes);

  void monomials(const Real* xi, Real* m) const;
  void monomial_grads(const Real* xi, Real* dm) const;

  Shape shape_;
  int degree_;
  int n_basis_;
  std::vector<Real> nodes_;
  std::vector<std::array<int, 2>> expo_;  // monomial exponents
  Eigen::FullPivLU<Eigen::MatrixXd> vand_t_;  // LU of V^T
};

/// Number of basis functions of the solution space.
int space_dim(Shape shape, int degree);

} // namespace rxdg::basis
