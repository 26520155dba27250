#include "rxdg/mesh_gen.hpp"

#include <cmath>
#include <cstdint>
#include <map>

#include "rxdg/errors.hpp"

namespace rxdg::mesh {

namespace {

/// splitmix64-based hash -> uniform in [-1, 1]
Real hash_unit(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  x = x ^ (x >> 31);
  return 2.0 * (static_cast<Real>(x >> 11) / 9007199254740992.0) - 1.0;
}

void assign_rect_btags(Mesh& m, const RectOptions& opt) {
  const Real tol = 1e-9 * std::max({opt.x1 - opt.x0, opt.y1 - opt.y0});
  for (auto& f : m.faces) {
    if (f.interior()) continue;
    const MeshElement& el = m.elements[f.elem_in];
    const int nc = el.n_corners();
    const Real* a = m.node(el.nodes[f.face_in]);
    const Real* b = m.node(el.nodes[(f.face_in + 1) % nc]);
    if (std::abs(a[0] - opt.x0) < tol && std::abs(b[0] - opt.x0) < tol) f.btag = 1;
    else if (std::abs(a[0] - opt.x1) < tol && std::abs(b[0] - opt.x1) < tol) f.btag = 2;
    else if (std::abs(a[1] - opt.y0) < tol && std::abs(b[1] - opt.y0) < tol) f.btag = 3;
    else if (std::abs(a[1] - opt.y1) < tol && std::abs(b[1] - opt.y1) < tol) f.btag = 4;
  }
  m.tag_names = {{1, "left"}, {2, "right"}, {3, "bottom"}, {4, "top"}};
}

std::vector<Real> rect_vertices(const RectOptions& opt) {
  const Real hx = (opt.x1 - opt.x0) / opt.nx;
  const Real hy = (opt.y1 - opt.y0) / opt.ny;
  std::vector<Real> pts;
  pts.reserve(2 * (opt.nx + 1) * (opt.ny + 1));
  for (int j = 0; j <= opt.ny; ++j)
    for (int i = 0; i <= opt.nx; ++i) {
      Real x = opt.x0 + i * hx;
      Real y = opt.y0 + j * hy;
      if (opt.jitter > 0 && i > 0 && i < opt.nx && j > 0 && j < opt.ny) {
        const uint64_t key = (static_cast<uint64_t>(opt.seed) << 40) ^
                             (static_cast<uint64_t>(i) << 20) ^ static_cast<uint64_t>(j);
        x += opt.jitter * hx * hash_unit(key);
        y += opt.jitter * hy * hash_unit(key ^ 0x5555aaaa5555aaaaull);
      }
      pts.push_back(x);
      pts.push_back(y);
    }
  return pts;
}

/// Inserts shared edge midpoints and (for quads) cell centers; then nudges
/// midpoints of interior edges where x > curve_from.
void elevate_to_quadratic(Mesh& m, const RectOptions& opt) {
  std::map<std::pair<int, int>, int> edge_mid;
  auto midpoint = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = edge_mid.find(key);
    if (it != edge_mid.end()) return it->second;
    const int id = static_cast<int>(m.nodes.size()) / m.dim;
    for (int k = 0; k < m.dim; ++k)
      m.nodes.push_back(0.5 * (m.node(a)[k] + m.node(b)[k]));
    edge_mid[key] = id;
    return id;
  };

  for (auto& el : m.elements) {
    const int nc = el.n_corners();
    std::vector<int> corners = el.nodes;
    for (int f = 0; f < nc; ++f)
      el.nodes.push_back(midpoint(corners[f], corners[(f + 1) % nc]));
    if (el.shape == Shape::quadrilateral) {
      // center node: mean of corners
      const int id = static_cast<int>(m.nodes.size()) / m.dim;
      Real c[2] = {0, 0};
      for (int v = 0; v < 4; ++v)
        for (int k = 0; k < 2; ++k) c[k] += 0.25 * m.node(corners[v])[k];
      m.nodes.push_back(c[0]);
      m.nodes.push_back(c[1]);
      el.nodes.push_back(id);
    }
    el.geom_degree = 2;
  }

  m.build_connectivity();

  if (opt.curve_amp > 0) {
    for (const auto& f : m.faces) {
      if (!f.interior()) continue;
      const MeshElement& el = m.elements[f.elem_in];
      const int nc = el.n_corners();
      const int a = el.nodes[f.face_in], b = el.nodes[(f.face_in + 1) % nc];
      const int mid = el.nodes[nc + f.face_in];
      Real* pm = &m.nodes[mid * m.dim];
      if (pm[0] <= opt.curve_from) continue;
      const Real ex = m.node(b)[0] - m.node(a)[0];
      const Real ey = m.node(b)[1] - m.node(a)[1];
      const Real len = std::sqrt(ex * ex + ey * ey);
      const uint64_t key = (static_cast<uint64_t>(opt.seed) << 32) ^
                           (static_cast<uint64_t>(std::min(a, b)) << 16) ^
                           static_cast<uint64_t>(std::max(a, b));
      const Real amp = opt.curve_amp * len * hash_unit(key);
      pm[0] += -ey / len * amp;
      pm[1] += ex / len * amp;
    }
  }
}

} // namespace

Mesh generate_line_mesh(Real x0, Real x1, int n) {
  if (n < 1) throw ValidationError("generate_line_mesh: n must be >= 1");
  Mesh m;
  m.dim = 1;
  for (int i = 0; i <= n; ++i) m.nodes.push_back(x0 + (x1 - x0) * i / n);
  for (int e = 0; e < n; ++e) {
    MeshElement el;
    el.shape = Shape::line;
    el.nodes = {e, e + 1};
    m.elements.push_back(el);
  }
  m.build_connectivity();
  for (auto& f : m.faces) {
    if (f.interior()) continue;
    const Real x = m.node(m.elements[f.elem_in].nodes[f.face_in == 0 ? 0 : 1])[0];
    f.btag = std::abs(x - x0) < std::abs(x - x1) ? 1 : 2;
  }
  m.tag_names = {{1, "left"}, {2, "right"}};
  return m;
}

Mesh generate_tri_rect(const RectOptions& opt) {
  if (opt.nx < 1 || opt.ny < 1)
    throw ValidationError("generate_tri_rect: nx, ny must be >= 1");
  Mesh m;
  m.dim = 2;
  m.nodes = rect_vertices(opt);
  auto vid = [&](int i, int j) { return j * (opt.nx + 1) + i; };
  for (int j = 0; j < opt.ny; ++j)
    for (int i = 0; i < opt.nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      MeshElement a, b;
      a.shape = b.shape = Shape::triangle;
      if ((i + j) % 2 == 0) {
        a.nodes = {v00, v10, v11};
        b.nodes = {v00, v11, v01};
      } else {
        a.nodes = {v00, v10, v01};
        b.nodes = {v10, v11, v01};
      }
      m.elements.push_back(a);
      m.elements.push_back(b);
    }
  m.build_connectivity();
  if (opt.geom_degree == 2) elevate_to_quadratic(m, opt);
  assign_rect_btags(m, opt);
  return m;
}

Mesh generate_quad_rect(const RectOptions& opt) {
  if (opt.nx < 1 || opt.ny < 1)
    throw ValidationError("generate_quad_rect: nx, ny must be >= 1");
  Mesh m;
  m.dim = 2;
  m.nodes = rect_vertices(opt);
  auto vid = [&](int i, int j) { return j * (opt.nx + 1) + i; };
  for (int j = 0; j < opt.ny; ++j)
    for (int i = 0; i < opt.nx; ++i) {
      MeshElement el;
      el.shape = Shape::quadrilateral;
      el.nodes = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
      m.elements.push_back(el);
    }
  m.build_connectivity();
  if (opt.geom_degree == 2) elevate_to_quadratic(m, opt);
  assign_rect_btags(m, opt);
  return m;
}

} // namespace rxdg::mesh
