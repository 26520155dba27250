#include "rxdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "rxdg/errors.hpp"

namespace rxdg::mesh {

void ReferenceElement::face_to_ref(int f, Real zeta, Real* xi) const {
  const ReferenceFace& fc = faces[f];
  const int d = dim();
  for (int k = 0; k < d; ++k)
    xi[k] = 0.5 * (1 - zeta) * fc.xi_a[k] + 0.5 * (1 + zeta) * fc.xi_b[k];
}

void ReferenceElement::face_point(int f, int l, Real* xi) const {
  if (dim() == 1) {
    xi[0] = faces[f].xi_a[0];
    return;
  }
  face_to_ref(f, face_rules[f].points[l], xi);
}

namespace {

ReferenceElement make_ref_skeleton(Shape shape, int geom_degree) {
  ReferenceElement ref;
  ref.shape = shape;
  ref.geom_degree = geom_degree;
  switch (shape) {
    case Shape::line: {
      ref.ref_volume = 2.0;
      ReferenceFace f0;
      f0.corners = {0};
      f0.xi_a = f0.xi_b = {-1.0, 0.0};
      ReferenceFace f1;
      f1.corners = {1};
      f1.xi_a = f1.xi_b = {1.0, 0.0};
      ref.faces = {f0, f1};
      break;
    }
    case Shape::triangle: {
      ref.ref_volume = 0.5;
      const std::array<std::array<Real, 2>, 3> v{{{0, 0}, {1, 0}, {0, 1}}};
      for (int f = 0; f < 3; ++f) {
        ReferenceFace fc;
        fc.corners = {f, (f + 1) % 3};
        fc.xi_a = v[f];
        fc.xi_b = v[(f + 1) % 3];
        const Real dx = fc.xi_b[0] - fc.xi_a[0], dy = fc.xi_b[1] - fc.xi_a[1];
        fc.ref_area = std::sqrt(dx * dx + dy * dy);
        ref.faces.push_back(fc);
      }
      break;
    }
    case Shape::quadrilateral: {
      ref.ref_volume = 4.0;
      const std::array<std::array<Real, 2>, 4> v{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
      for (int f = 0; f < 4; ++f) {
        ReferenceFace fc;
        fc.corners = {f, (f + 1) % 4};
        fc.xi_a = v[f];
        fc.xi_b = v[(f + 1) % 4];
        fc.ref_area = 2.0;
        ref.faces.push_back(fc);
      }
      break;
    }
    default:
      throw UnsupportedShape("build_reference: tetrahedra are not supported");
  }
  return ref;
}

} // namespace

ReferenceElement build_reference(Shape shape, int p, int geom_degree,
                                 int vol_rule_order,
                                 const std::vector<int>& surf_rule_orders) {
  const int min_order = 2 * p + 1;
  if (vol_rule_order < min_order)
    throw ValidationError("build_reference: volume rule order below 2p+1");
  ReferenceElement ref = make_ref_skeleton(shape, geom_degree);
  switch (shape) {
    case Shape::line:
      ref.vol_rule = quad::line_rule(vol_rule_order);
      break;
    case Shape::triangle:
      ref.vol_rule = quad::triangle_rule(vol_rule_order);
      break;
    case Shape::quadrilateral:
      ref.vol_rule = quad::quad_rule(vol_rule_order);
      break;
    default:
      throw UnsupportedShape("build_reference: unsupported shape");
  }
  if (static_cast<int>(surf_rule_orders.size()) != ref.n_faces())
    throw ValidationError("build_reference: one surface order per face required");
  for (int f = 0; f < ref.n_faces(); ++f) {
    if (shape == Shape::line) {
      ref.face_rules.push_back(quad::point_rule());
    } else {
      if (surf_rule_orders[f] < min_order)
        throw ValidationError("build_reference: face rule order below 2p+1");
      ref.face_rules.push_back(quad::gauss_legendre(surf_rule_orders[f] / 2 + 1));
    }
  }
  return ref;
}

ReferenceElement build_reference(Shape shape, int p, int geom_degree,
                                 int vol_rule_order, int surf_rule_order) {
  ReferenceElement tmp = make_ref_skeleton(shape, geom_degree);
  return build_reference(shape, p, geom_degree, vol_rule_order,
                         std::vector<int>(tmp.n_faces(), surf_rule_order));
}

Real ElementGeometry::surface() const {
  Real s = 0;
  for (const auto& f : faces) s += f.area;
  return s;
}

Real ElementGeometry::h() const {
  const int d = ref->dim();
  return (d + 1) * volume / surface();
}

void ElementGeometry::map_point(const basis::NodalBasis& geom_basis, const Real* xi,
                                Real* x, Real* jac, Real* det) const {
  const int d = ref->dim();
  const int ng = geom_basis.n_basis();
  std::vector<Real> phi(ng), dphi(ng * d);
  geom_basis.eval(xi, phi.data());
  geom_basis.eval_grad(xi, dphi.data());
  for (int k = 0; k < d; ++k) x[k] = 0;
  Real J[4] = {0, 0, 0, 0};
  for (int m = 0; m < ng; ++m)
    for (int k = 0; k < d; ++k) {
      x[k] += geom_nodes[m * d + k] * phi[m];
      for (int l = 0; l < d; ++l) J[k * d + l] += geom_nodes[m * d + k] * dphi[m * d + l];
    }
  if (jac)
    for (int i = 0; i < d * d; ++i) jac[i] = J[i];
  if (det) *det = d == 1 ? J[0] : J[0] * J[3] - J[1] * J[2];
}

ElementGeometry map_and_metrics(const ReferenceElement& ref,
                                std::span<const Real> geom_nodes) {
  const int d = ref.dim();
  const basis::NodalBasis gb = basis::NodalBasis::geometry(ref.shape, ref.geom_degree);
  if (static_cast<int>(geom_nodes.size()) != gb.n_basis() * d)
    throw ValidationError("map_and_metrics: geometry node count mismatch");

  ElementGeometry g;
  g.ref = &ref;
  g.geom_nodes.assign(geom_nodes.begin(), geom_nodes.end());

  const int nq = ref.vol_rule.npts();
  g.jac_det.resize(nq);
  g.xvol.resize(nq * d);
  g.volume = 0;
  for (int q = 0; q < nq; ++q) {
    Real xi[2] = {0, 0};
    for (int k = 0; k < d; ++k) xi[k] = ref.vol_rule.pt(q, k);
    Real det;
    g.map_point(gb, xi, &g.xvol[q * d], nullptr, &det);
    if (!(det > 0)) {
      std::ostringstream os;
      os << "map_and_metrics: nonpositive Jacobian " << det
         << " at volume point " << q;
      throw DegenerateElement(os.str());
    }
    g.jac_det[q] = det;
    g.volume += det * ref.vol_rule.weights[q];
  }

  g.faces.resize(ref.n_faces());
  for (int f = 0; f < ref.n_faces(); ++f) {
    FaceGeometry& fg = g.faces[f];
    const int nl = ref.face_npts(f);
    fg.nu.resize(nl);
    fg.normals.resize(nl * d);
    fg.xphys.resize(nl * d);
    fg.area = 0;
    for (int l = 0; l < nl; ++l) {
      Real xi[2] = {0, 0};
      ref.face_point(f, l, xi);
      Real J[4], det;
      Real* xp = &fg.xphys[l * d];
      g.map_point(gb, xi, xp, J, &det);
      if (d == 1) {
        // point "faces": unit surface measure, outward sign from the map
        const Real sgn = (f == 0 ? -1.0 : 1.0) * (J[0] > 0 ? 1.0 : -1.0);
        fg.nu[l] = 1.0;
        fg.normals[l * d] = sgn;
        fg.area += 1.0;
      } else {
        const ReferenceFace& rf = ref.faces[f];
        const Real d_xi[2] = {0.5 * (rf.xi_b[0] - rf.xi_a[0]),
                              0.5 * (rf.xi_b[1] - rf.xi_a[1])};
        const Real tx = J[0] * d_xi[0] + J[1] * d_xi[1];
        const Real ty = J[2] * d_xi[0] + J[3] * d_xi[1];
        const Real jn = std::sqrt(tx * tx + ty * ty);
        if (!(jn > 0))
          throw DegenerateElement("map_and_metrics: degenerate face Jacobian");
        fg.nu[l] = jn * ref.face_rules[f].weights[l];
        fg.normals[l * d + 0] = ty / jn;
        fg.normals[l * d + 1] = -tx / jn;
        fg.area += fg.nu[l];
      }
    }
  }
  return g;
}

int MeshElement::n_corners() const {
  switch (shape) {
    case Shape::line: return 2;
    case Shape::triangle: return 3;
    case Shape::quadrilateral: return 4;
    default: return 0;
  }
}

std::vector<Real> Mesh::element_geom_nodes(int e) const {
  const MeshElement& el = elements[e];
  std::vector<Real> out(el.nodes.size() * dim);
  for (size_t m = 0; m < el.nodes.size(); ++m)
    for (int k = 0; k < dim; ++k) out[m * dim + k] = node(el.nodes[m])[k];
  return out;
}

namespace {

/// Local face -> corner node ids, in traversal order.
std::vector<std::vector<int>> face_corner_lists(const MeshElement& el) {
  switch (el.shape) {
    case Shape::line:
      return {{el.nodes[0]}, {el.nodes[1]}};
    case Shape::triangle:
      return {{el.nodes[0], el.nodes[1]},
              {el.nodes[1], el.nodes[2]},
              {el.nodes[2], el.nodes[0]}};
    case Shape::quadrilateral:
      return {{el.nodes[0], el.nodes[1]},
              {el.nodes[1], el.nodes[2]},
              {el.nodes[2], el.nodes[3]},
              {el.nodes[3], el.nodes[0]}};
    default:
      return {};
  }
}

std::vector<int> sorted_key(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

} // namespace

void Mesh::build_connectivity() {
  faces.clear();
  elem_faces.assign(elements.size(), {});

  struct Half {
    int elem, face;
    std::vector<int> corners;  // traversal order
  };
  std::map<std::vector<int>, std::vector<Half>> by_key;
  for (int e = 0; e < n_elements(); ++e) {
    auto lists = face_corner_lists(elements[e]);
    for (int f = 0; f < static_cast<int>(lists.size()); ++f)
      by_key[sorted_key(lists[f])].push_back({e, f, lists[f]});
  }

  for (auto& [key, halves] : by_key) {
    if (halves.size() > 2)
      throw NonconformingMesh("build_connectivity: face shared by more than two elements");
    MeshFace mf;
    if (halves.size() == 2) {
      // owner = lower element id
      if (halves[0].elem > halves[1].elem) std::swap(halves[0], halves[1]);
      mf.elem_in = halves[0].elem;
      mf.face_in = halves[0].face;
      mf.elem_out = halves[1].elem;
      mf.face_out = halves[1].face;
      if (dim == 1) {
        mf.flip = false;
      } else {
        // conforming CCW elements traverse a shared edge in opposite senses
        mf.flip = halves[0].corners[0] == halves[1].corners[1];
        if (!mf.flip && halves[0].corners[0] != halves[1].corners[0])
          throw NonconformingMesh("build_connectivity: inconsistent face orientation");
      }
    } else {
      mf.elem_in = halves[0].elem;
      mf.face_in = halves[0].face;
    }
    const int fid = static_cast<int>(faces.size());
    faces.push_back(mf);
    elem_faces[mf.elem_in].push_back(fid);
    if (mf.elem_out >= 0) elem_faces[mf.elem_out].push_back(fid);
  }

  // Hanging-node detection: a boundary-face corner strictly inside another
  // boundary face marks a T-junction.
  if (dim == 2) {
    std::vector<int> bnd;
    for (int i = 0; i < n_faces(); ++i)
      if (!faces[i].interior()) bnd.push_back(i);
    for (int ia : bnd) {
      auto ca = face_corner_lists(elements[faces[ia].elem_in])[faces[ia].face_in];
      const Real* a0 = node(ca[0]);
      const Real* a1 = node(ca[1]);
      const Real len2 = (a1[0] - a0[0]) * (a1[0] - a0[0]) + (a1[1] - a0[1]) * (a1[1] - a0[1]);
      for (int ib : bnd) {
        if (ia == ib) continue;
        auto cb = face_corner_lists(elements[faces[ib].elem_in])[faces[ib].face_in];
        for (int nid : cb) {
          if (nid == ca[0] || nid == ca[1]) continue;
          const Real* p = node(nid);
          const Real t = ((p[0] - a0[0]) * (a1[0] - a0[0]) + (p[1] - a0[1]) * (a1[1] - a0[1])) / len2;
          if (t <= 1e-10 || t >= 1 - 1e-10) continue;
          const Real px = a0[0] + t * (a1[0] - a0[0]);
          const Real py = a0[1] + t * (a1[1] - a0[1]);
          const Real d2 = (p[0] - px) * (p[0] - px) + (p[1] - py) * (p[1] - py);
          if (d2 < 1e-20 * len2)
            throw NonconformingMesh("build_connectivity: hanging node detected");
        }
      }
    }
  }

  // stable face ordering per element (by local face id) for determinism
  for (int e = 0; e < n_elements(); ++e) {
    auto& lst = elem_faces[e];
    std::sort(lst.begin(), lst.end(), [&](int a, int b) {
      const int fa = faces[a].elem_in == e ? faces[a].face_in : faces[a].face_out;
      const int fb = faces[b].elem_in == e ? faces[b].face_in : faces[b].face_out;
      return fa < fb;
    });
  }
}

void Mesh::make_periodic(int tag_a, int tag_b) {
  std::vector<int> fa, fb;
  for (int i = 0; i < n_faces(); ++i) {
    if (faces[i].interior()) continue;
    if (faces[i].btag == tag_a) fa.push_back(i);
    if (faces[i].btag == tag_b) fb.push_back(i);
  }
  if (fa.empty() || fa.size() != fb.size())
    throw ValidationError("make_periodic: tag face counts do not match");

  auto centroid = [&](int fid, Real* c) {
    auto corners = face_corner_lists(elements[faces[fid].elem_in])[faces[fid].face_in];
    for (int k = 0; k < dim; ++k) c[k] = 0;
    for (int nid : corners)
      for (int k = 0; k < dim; ++k) c[k] += node(nid)[k] / corners.size();
  };

  // translation from the a-side to the b-side, from the first pairing
  Real ca0[2], scale = 0;
  centroid(fa[0], ca0);
  for (int i = 0; i < n_faces(); ++i) {
    auto corners = face_corner_lists(elements[faces[i].elem_in])[faces[i].face_in];
    for (int nid : corners)
      for (int k = 0; k < dim; ++k) scale = std::max(scale, std::abs(node(nid)[k]));
  }
  const Real tol = 1e-9 * std::max<Real>(scale, 1);

  // candidate offsets: match fa[0] against each b face, then verify globally
  for (int jb : fb) {
    Real cb[2];
    centroid(jb, cb);
    Real off[2] = {0, 0};
    for (int k = 0; k < dim; ++k) off[k] = cb[k] - ca0[k];

    std::vector<std::pair<int, int>> pairs;
    bool ok = true;
    std::vector<bool> used(fb.size(), false);
    for (int ia : fa) {
      Real c[2];
      centroid(ia, c);
      bool matched = false;
      for (size_t j = 0; j < fb.size(); ++j) {
        if (used[j]) continue;
        Real c2[2];
        centroid(fb[j], c2);
        Real err = 0;
        for (int k = 0; k < dim; ++k) err += std::abs(c[k] + off[k] - c2[k]);
        if (err < tol) {
          pairs.emplace_back(ia, fb[j]);
          used[j] = true;
          matched = true;
          break;
        }
      }
      if (!matched) { ok = false; break; }
    }
    if (!ok) continue;

    // merge each pair into a single periodic interior face
    std::vector<int> dead;
    for (auto [ia, ib] : pairs) {
      MeshFace& A = faces[ia];
      const MeshFace& B = faces[ib];
      A.elem_out = B.elem_in;
      A.face_out = B.face_in;
      A.periodic = true;
      A.offset = {off[0], dim > 1 ? off[1] : 0};
      A.flip = dim > 1;  // both sides CCW in their elements
      A.btag = 0;
      elem_faces[B.elem_in].push_back(ia);
      dead.push_back(ib);
    }
    std::sort(dead.rbegin(), dead.rend());
    for (int ib : dead) {
      faces.erase(faces.begin() + ib);
      for (auto& lst : elem_faces)
        for (auto& fid : lst) {
          if (fid == ib) fid = -1;
          if (fid > ib) --fid;
        }
    }
    for (auto& lst : elem_faces)
      lst.erase(std::remove(lst.begin(), lst.end(), -1), lst.end());
    return;
  }
  throw ValidationError("make_periodic: no rigid translation matches the tags");
}

} // namespace rxdg::mesh
