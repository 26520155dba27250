#pragma once

#include <iosfwd>
#include <string>

#include "rxdg/mesh.hpp"

namespace rxdg::mesh {

/// Reads an ASCII gmsh mesh, MSH 2.2 or 4.1. Supported element types:
/// 1/8 (2-/3-node line), 2/9 (3-/6-node triangle), 3/10 (4-/9-node quad),
/// 15 (point, boundary markers in 1D). Builds connectivity and rejects
/// hanging nodes.
Mesh read_gmsh(std::istream& in, const std::string& origin = "<stream>");
Mesh read_gmsh_file(const std::string& path);

/// Writes MSH 2.2 ASCII (domain elements plus tagged boundary faces).
void write_gmsh(const Mesh& m, std::ostream& out);
void write_gmsh_file(const Mesh& m, const std::string& path);

} // namespace rxdg::mesh
