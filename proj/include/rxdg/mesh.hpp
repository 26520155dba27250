#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "rxdg/basis.hpp"
#include "rxdg/quadrature.hpp"

namespace rxdg::mesh {

using basis::Shape;

/// A face of the reference element with its parameterization
/// zeta in [-1,1] -> xi (for 1D elements the face is a single point).
struct ReferenceFace {
  std::vector<int> corners;    // local corner indices
  Real ref_area = 1;           // |ref face|
  std::array<Real, 2> xi_a{};  // xi at zeta = -1
  std::array<Real, 2> xi_b{};  // xi at zeta = +1 (equals xi_a in 1D)
};

/// Reference element: shape, geometry degree, volume rule with positive
/// weights, and a (possibly different) positive rule per face.
struct ReferenceElement {
  Shape shape = Shape::line;
  int geom_degree = 1;
  Real ref_volume = 0;
  std::vector<ReferenceFace> faces;
  quad::QuadratureRule vol_rule;
  std::vector<quad::QuadratureRule> face_rules;

  int dim() const { return basis::shape_dim(shape); }
  int n_faces() const { return static_cast<int>(faces.size()); }
  int face_npts(int f) const {
    return dim() == 1 ? 1 : face_rules[f].npts();
  }
  /// Map a face parameter to element reference coordinates.
  void face_to_ref(int f, Real zeta, Real* xi) const;
  /// Reference coordinates of the l-th quadrature point of face f.
  void face_point(int f, int l, Real* xi) const;
  Real face_param(int f, int l) const {
    return dim() == 1 ? 0.0 : face_rules[f].points[l];
  }
};

/// Builds a reference element; rule orders of at least 2p+1 are expected by
/// the solver (exactness for averages of degree-2p products).
ReferenceElement build_reference(Shape shape, int p, int geom_degree,
                                 int vol_rule_order, int surf_rule_order);

/// Variant with a distinct quadrature order per face.
ReferenceElement build_reference(Shape shape, int p, int geom_degree,
                                 int vol_rule_order,
                                 const std::vector<int>& surf_rule_orders);

/// Metric terms of one physical element at the reference rules' points.
struct FaceGeometry {
  std::vector<Real> nu;       // |J_face| w at each face point
  std::vector<Real> normals;  // npts x dim, outward unit
  std::vector<Real> xphys;    // npts x dim
  Real area = 0;              // |face|
};

struct ElementGeometry {
  const ReferenceElement* ref = nullptr;
  std::vector<Real> geom_nodes;  // n_g x dim physical coordinates
  std::vector<Real> jac_det;     // |J| at volume points
  std::vector<Real> xvol;        // physical coords of volume points
  Real volume = 0;               // sum |J| w
  std::vector<FaceGeometry> faces;

  Real surface() const;
  Real h() const;  // inradius-style proxy (d+1)|k|/|dk|

  /// Physical coordinates and Jacobian at an arbitrary reference point.
  void map_point(const basis::NodalBasis& geom_basis, const Real* xi,
                 Real* x, Real* jac, Real* det) const;
};

/// Computes all metric terms; throws DegenerateElement on nonpositive
/// Jacobians.
ElementGeometry map_and_metrics(const ReferenceElement& ref,
                                std::span<const Real> geom_nodes);

struct MeshElement {
  Shape shape = Shape::line;
  int geom_degree = 1;
  std::vector<int> nodes;  // gmsh-ordered geometry node ids
  int n_corners() const;
};

struct MeshFace {
  int elem_in = -1;   // owner (lower element id)
  int face_in = -1;
  int elem_out = -1;  // -1 on boundary
  int face_out = -1;
  bool flip = true;   // neighbor traverses the face in the opposite sense
  int btag = 0;       // boundary tag; 0 when untagged/interior
  bool periodic = false;
  std::array<Real, 2> offset{0, 0};  // owner-side + offset = neighbor-side

  bool interior() const { return elem_out >= 0; }
};

class Mesh {
public:
  int dim = 0;
  std::vector<Real> nodes;  // node-major, dim coords each
  std::vector<MeshElement> elements;
  std::vector<MeshFace> faces;
  std::vector<std::vector<int>> elem_faces;  // per element, face ids
  std::map<int, std::string> tag_names;

  int n_elements() const { return static_cast<int>(elements.size()); }
  int n_faces() const { return static_cast<int>(faces.size()); }
  const Real* node(int i) const { return &nodes[i * dim]; }

  /// Corner-node connectivity -> interior faces, boundary tags, and the
  /// hanging-node check. Called by the readers/generators.
  void build_connectivity();

  /// Pairs boundary faces carrying tag_a with those carrying tag_b by rigid
  /// translation; they become interior periodic faces.
  void make_periodic(int tag_a, int tag_b);

  std::vector<Real> element_geom_nodes(int e) const;
};

} // namespace rxdg::mesh
