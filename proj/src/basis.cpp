#include "rxdg/basis.hpp"

#include <cassert>
#include <cmath>

#include "rxdg/errors.hpp"
#include "rxdg/quadrature.hpp"

namespace rxdg::basis {

int shape_dim(Shape s) {
  switch (s) {
    case Shape::line: return 1;
    case Shape::triangle:
    case Shape::quadrilateral: return 2;
    case Shape::tetrahedron: return 3;
  }
  return 0;
}

int space_dim(Shape shape, int degree) {
  switch (shape) {
    case Shape::line: return degree + 1;
    case Shape::triangle: return (degree + 1) * (degree + 2) / 2;
    case Shape::quadrilateral: return (degree + 1) * (degree + 1);
    case Shape::tetrahedron:
      return (degree + 1) * (degree + 2) * (degree + 3) / 6;
  }
  return 0;
}

namespace {

std::vector<Real> solution_nodes(Shape shape, int p) {
  std::vector<Real> nodes;
  switch (shape) {
    case Shape::line: {
      if (p == 0) return {0.0};
      auto gl = quad::gauss_lobatto(p + 1);
      return gl.points;
    }
    case Shape::triangle: {
      if (p == 0) return {1.0 / 3, 1.0 / 3};
      for (int j = 0; j <= p; ++j)
        for (int i = 0; i <= p - j; ++i) {
          nodes.push_back(static_cast<Real>(i) / p);
          nodes.push_back(static_cast<Real>(j) / p);
        }
      return nodes;
    }
    case Shape::quadrilateral: {
      if (p == 0) return {0.0, 0.0};
      auto gl = quad::gauss_lobatto(p + 1);
      for (int j = 0; j <= p; ++j)
        for (int i = 0; i <= p; ++i) {
          nodes.push_back(gl.points[i]);
          nodes.push_back(gl.points[j]);
        }
      return nodes;
    }
    default:
      throw UnsupportedShape("solution basis: unsupported element shape");
  }
}

std::vector<Real> geometry_nodes(Shape shape, int degree) {
  if (degree != 1 && degree != 2)
    throw UnsupportedShape("geometry basis: degree must be 1 or 2");
  switch (shape) {
    case Shape::line:
      if (degree == 1) return {-1.0, 1.0};
      return {-1.0, 1.0, 0.0};
    case Shape::triangle:
      if (degree == 1) return {0, 0, 1, 0, 0, 1};
      return {0, 0, 1, 0, 0, 1, 0.5, 0, 0.5, 0.5, 0, 0.5};
    case Shape::quadrilateral:
      if (degree == 1) return {-1, -1, 1, -1, 1, 1, -1, 1};
      return {-1, -1, 1, -1, 1, 1, -1, 1, 0, -1, 1, 0, 0, 1, -1, 0, 0, 0};
    default:
      throw UnsupportedShape("geometry basis: unsupported element shape");
  }
}

} // namespace

NodalBasis NodalBasis::solution(Shape shape, int degree) {
  return NodalBasis(shape, degree, solution_nodes(shape, degree));
}

NodalBasis NodalBasis::geometry(Shape shape, int degree) {
  return NodalBasis(shape, degree, geometry_nodes(shape, degree));
}

NodalBasis NodalBasis::on_nodes(Shape shape, int degree, std::vector<Real> nodes) {
  return NodalBasis(shape, degree, std::move(nodes));
}

NodalBasis::NodalBasis(Shape shape, int degree, std::vector<Real> nodes)
    : shape_(shape), degree_(degree), nodes_(std::move(nodes)) {
  const int d = dim();
  n_basis_ = static_cast<int>(nodes_.size()) / d;
  if (n_basis_ != space_dim(shape, degree))
    throw Error("nodal basis: node count does not match the polynomial space");

  // monomial exponent set of the space
  expo_.clear();
  if (shape == Shape::line) {
    for (int a = 0; a <= degree; ++a) expo_.push_back({a, 0});
  } else if (shape == Shape::triangle) {
    for (int t = 0; t <= degree; ++t)
      for (int a = t; a >= 0; --a) expo_.push_back({a, t - a});
  } else if (shape == Shape::quadrilateral) {
    for (int bexp = 0; bexp <= degree; ++bexp)
      for (int a = 0; a <= degree; ++a) expo_.push_back({a, bexp});
  } else {
    throw UnsupportedShape("nodal basis: unsupported element shape");
  }

  Eigen::MatrixXd V(n_basis_, n_basis_);
  std::vector<Real> m(n_basis_);
  for (int i = 0; i < n_basis_; ++i) {
    monomials(&nodes_[i * d], m.data());
    for (int j = 0; j < n_basis_; ++j) V(i, j) = m[j];
  }
  vand_t_.compute(V.transpose());
  if (!vand_t_.isInvertible())
    throw Error("nodal basis: interpolation nodes are not unisolvent");
}

void NodalBasis::monomials(const Real* xi, Real* m) const {
  const Real x = xi[0];
  const Real y = dim() > 1 ? xi[1] : 0;
  for (int j = 0; j < n_basis_; ++j)
    m[j] = std::pow(x, expo_[j][0]) * (dim() > 1 ? std::pow(y, expo_[j][1]) : 1.0);
}

void NodalBasis::monomial_grads(const Real* xi, Real* dm) const {
  const int d = dim();
  const Real x = xi[0];
  const Real y = d > 1 ? xi[1] : 0;
  for (int j = 0; j < n_basis_; ++j) {
    const int a = expo_[j][0], b = expo_[j][1];
    dm[j * d + 0] = a == 0 ? 0.0 : a * std::pow(x, a - 1) * (d > 1 ? std::pow(y, b) : 1.0);
    if (d > 1) dm[j * d + 1] = b == 0 ? 0.0 : b * std::pow(y, b - 1) * std::pow(x, a);
  }
}

void NodalBasis::eval(const Real* xi, Real* phi) const {
  Eigen::VectorXd m(n_basis_);
  std::vector<Real> mm(n_basis_);
  monomials(xi, mm.data());
  for (int j = 0; j < n_basis_; ++j) m(j) = mm[j];
  Eigen::VectorXd r = vand_t_.solve(m);
  for (int j = 0; j < n_basis_; ++j) phi[j] = r(j);
}

Eigen::VectorXd NodalBasis::eval(const Real* xi) const {
  Eigen::VectorXd out(n_basis_);
  eval(xi, out.data());
  return out;
}

void NodalBasis::eval_grad(const Real* xi, Real* dphi) const {
  const int d = dim();
  std::vector<Real> dm(n_basis_ * d);
  monomial_grads(xi, dm.data());
  Eigen::MatrixXd M(n_basis_, d);
  for (int j = 0; j < n_basis_; ++j)
    for (int k = 0; k < d; ++k) M(j, k) = dm[j * d + k];
  Eigen::MatrixXd R = vand_t_.solve(M);
  for (int j = 0; j < n_basis_; ++j)
    for (int k = 0; k < d; ++k) dphi[j * d + k] = R(j, k);
}

} // namespace rxdg::basis
