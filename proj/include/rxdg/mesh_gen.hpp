#pragma once

#include "rxdg/mesh.hpp"

namespace rxdg::mesh {

/// n line elements on [x0, x1]; boundary tags 1 = left, 2 = right.
Mesh generate_line_mesh(Real x0, Real x1, int n);

struct RectOptions {
  Real x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  int nx = 8, ny = 8;
  Real jitter = 0;       // interior vertex jitter, fraction of local spacing
  unsigned seed = 1;
  int geom_degree = 1;   // 2 inserts edge midpoints
  Real curve_amp = 0;    // interior edge midpoint offset, fraction of length
  Real curve_from = -1e300;  // perturb midpoints only where x > curve_from
};

/// Structured triangulation (two triangles per cell, alternating diagonal)
/// with optional vertex jitter and quadratic curving.
/// Boundary tags: 1 = left, 2 = right, 3 = bottom, 4 = top.
Mesh generate_tri_rect(const RectOptions& opt);

/// Structured quadrilateral mesh with the same options and tags.
Mesh generate_quad_rect(const RectOptions& opt);

} // namespace rxdg::mesh
