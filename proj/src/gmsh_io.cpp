#include "rxdg/gmsh_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "rxdg/errors.hpp"

namespace rxdg::mesh {

namespace {

struct Line {
  std::string text;
  int number = 0;
};

class LineReader {
public:
  LineReader(std::istream& in, std::string origin)
      : in_(in), origin_(std::move(origin)) {}

  bool next(Line& l) {
    while (std::getline(in_, l.text)) {
      ++line_no_;
      // strip trailing CR from files written on other platforms
      while (!l.text.empty() && (l.text.back() == '\r' || l.text.back() == '\n'))
        l.text.pop_back();
      l.number = line_no_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(int line, const std::string& what) const {
    std::ostringstream os;
    os << origin_ << ":" << line << ": " << what;
    throw ParseError(os.str());
  }
  [[noreturn]] void fail(const std::string& what) const { fail(line_no_, what); }

  int line_no() const { return line_no_; }

private:
  std::istream& in_;
  std::string origin_;
  int line_no_ = 0;
};

struct RawElement {
  int type = 0;
  int phys = 0;
  std::vector<long> nodes;
};

int type_dim(int t) {
  switch (t) {
    case 15: return 0;
    case 1: case 8: return 1;
    case 2: case 9: case 3: case 10: return 2;
    default: return -1;
  }
}

int type_nnodes(int t) {
  switch (t) {
    case 15: return 1;
    case 1: return 2;
    case 8: return 3;
    case 2: return 3;
    case 9: return 6;
    case 3: return 4;
    case 10: return 9;
    default: return -1;
  }
}

Shape type_shape(int t) {
  switch (t) {
    case 1: case 8: return Shape::line;
    case 2: case 9: return Shape::triangle;
    case 3: case 10: return Shape::quadrilateral;
    default: return Shape::line;
  }
}

int type_geom_degree(int t) { return (t == 8 || t == 9 || t == 10) ? 2 : 1; }

Mesh assemble(const std::map<long, std::array<Real, 3>>& raw_nodes,
              const std::vector<RawElement>& raw_elems,
              const std::map<int, std::string>& names, LineReader& rd) {
  int mesh_dim = 0;
  for (const auto& e : raw_elems) mesh_dim = std::max(mesh_dim, type_dim(e.type));
  if (mesh_dim == 0) rd.fail("mesh contains no line/triangle/quad elements");

  Mesh m;
  m.dim = mesh_dim;
  m.tag_names = names;

  std::map<long, int> node_id;
  m.nodes.reserve(raw_nodes.size() * mesh_dim);
  for (const auto& [tag, xyz] : raw_nodes) {
    node_id[tag] = static_cast<int>(node_id.size());
    for (int k = 0; k < mesh_dim; ++k) m.nodes.push_back(xyz[k]);
  }

  // boundary tags, keyed by the sorted corner tuple of the facet
  std::map<std::vector<int>, int> facet_tags;
  for (const auto& e : raw_elems) {
    const int d = type_dim(e.type);
    std::vector<int> ids;
    for (long t : e.nodes) {
      auto it = node_id.find(t);
      if (it == node_id.end()) rd.fail("element references unknown node");
      ids.push_back(it->second);
    }
    if (d == mesh_dim) {
      MeshElement el;
      el.shape = type_shape(e.type);
      el.geom_degree = type_geom_degree(e.type);
      el.nodes = ids;
      m.elements.push_back(el);
    } else if (d == mesh_dim - 1 && e.phys != 0) {
      std::vector<int> key(ids.begin(), ids.begin() + (d == 0 ? 1 : 2));
      std::sort(key.begin(), key.end());
      facet_tags[key] = e.phys;
    }
  }
  if (m.elements.empty()) rd.fail("no domain elements found");

  m.build_connectivity();

  for (auto& f : m.faces) {
    if (f.interior()) continue;
    // corner tuple of this boundary face
    const MeshElement& el = m.elements[f.elem_in];
    std::vector<int> key;
    if (m.dim == 1) {
      key = {el.nodes[f.face_in == 0 ? 0 : 1]};
    } else {
      const int nc = el.n_corners();
      key = {el.nodes[f.face_in], el.nodes[(f.face_in + 1) % nc]};
      std::sort(key.begin(), key.end());
    }
    auto it = facet_tags.find(key);
    if (it != facet_tags.end()) f.btag = it->second;
  }
  return m;
}

Mesh read_msh2(LineReader& rd) {
  std::map<long, std::array<Real, 3>> raw_nodes;
  std::vector<RawElement> raw_elems;
  std::map<int, std::string> names;

  Line l;
  while (rd.next(l)) {
    if (l.text == "$PhysicalNames") {
      if (!rd.next(l)) rd.fail("unexpected EOF in $PhysicalNames");
      const int n = std::stoi(l.text);
      for (int i = 0; i < n; ++i) {
        if (!rd.next(l)) rd.fail("unexpected EOF in $PhysicalNames");
        std::istringstream is(l.text);
        int dim, tag;
        std::string name;
        is >> dim >> tag >> name;
        if (name.size() >= 2 && name.front() == '"')
          name = name.substr(1, name.size() - 2);
        names[tag] = name;
      }
    } else if (l.text == "$Nodes") {
      if (!rd.next(l)) rd.fail("unexpected EOF in $Nodes");
      const long n = std::stol(l.text);
      for (long i = 0; i < n; ++i) {
        if (!rd.next(l)) rd.fail("unexpected EOF in $Nodes");
        std::istringstream is(l.text);
        long tag;
        Real x, y, z;
        if (!(is >> tag >> x >> y >> z)) rd.fail(l.number, "malformed node line");
        raw_nodes[tag] = {x, y, z};
      }
    } else if (l.text == "$Elements") {
      if (!rd.next(l)) rd.fail("unexpected EOF in $Elements");
      const long n = std::stol(l.text);
      for (long i = 0; i < n; ++i) {
        if (!rd.next(l)) rd.fail("unexpected EOF in $Elements");
        std::istringstream is(l.text);
        long id;
        int type, ntags;
        if (!(is >> id >> type >> ntags)) rd.fail(l.number, "malformed element line");
        const int nn = type_nnodes(type);
        if (nn < 0) {
          std::ostringstream os;
          os << "unsupported element type " << type;
          rd.fail(l.number, os.str());
        }
        RawElement e;
        e.type = type;
        for (int t = 0; t < ntags; ++t) {
          int tag;
          if (!(is >> tag)) rd.fail(l.number, "missing element tag");
          if (t == 0) e.phys = tag;
        }
        for (int k = 0; k < nn; ++k) {
          long nid;
          if (!(is >> nid)) rd.fail(l.number, "missing element node");
          e.nodes.push_back(nid);
        }
        raw_elems.push_back(std::move(e));
      }
    }
  }
  return assemble(raw_nodes, raw_elems, names, rd);
}

Mesh read_msh4(LineReader& rd) {
  std::map<long, std::array<Real, 3>> raw_nodes;
  std::vector<RawElement> raw_elems;
  std::map<int, std::string> names;
  // (entity dim, entity tag) -> first physical tag
  std::map<std::pair<int, int>, int> entity_phys;

  Line l;
  while (rd.next(l)) {
    if (l.text == "$PhysicalNames") {
      if (!rd.next(l)) rd.fail("unexpected EOF in $PhysicalNames");
      const int n = std::stoi(l.text);
      for (int i = 0; i < n; ++i) {
        if (!rd.next(l)) rd.fail("unexpected EOF in $PhysicalNames");
        std::istringstream is(l.text);
        int dim, tag;
        std::string name;
        is >> dim >> tag >> name;
        if (name.size() >= 2 && name.front() == '"')
          name = name.substr(1, name.size() - 2);
        names[tag] = name;
      }
    } else if (l.text == "$Entities") {
      if (!rd.next(l)) rd.fail("unexpected EOF in $Entities");
      long np, nc, ns, nv;
      {
        std::istringstream is(l.text);
        if (!(is >> np >> nc >> ns >> nv)) rd.fail(l.number, "malformed $Entities header");
      }
      auto read_entity = [&](int dim, bool is_point) {
        if (!rd.next(l)) rd.fail("unexpected EOF in $Entities");
        std::istringstream is(l.text);
        int tag;
        is >> tag;
        double skip;
        const int ncoord = is_point ? 3 : 6;
        for (int k = 0; k < ncoord; ++k) is >> skip;
        long nphys;
        is >> nphys;
        int phys = 0;
        for (long k = 0; k < nphys; ++k) {
          int p;
          is >> p;
          if (k == 0) phys = p;
        }
        if (phys != 0) entity_phys[{dim, tag}] = phys;
      };
      for (long i = 0; i < np; ++i) read_entity(0, true);
      for (long i = 0; i < nc; ++i) read_entity(1, false);
      for (long i = 0; i < ns; ++i) read_entity(2, false);
      for (long i = 0; i < nv; ++i) read_entity(3, false);
    } else if (l.text == "$Nodes") {
      if (!rd.next(l)) rd.fail("unexpected EOF in $Nodes");
      long nblocks, ntotal, mn, mx;
      {
        std::istringstream is(l.text);
        if (!(is >> nblocks >> ntotal >> mn >> mx)) rd.fail(l.number, "malformed $Nodes header");
      }
      for (long b = 0; b < nblocks; ++b) {
        if (!rd.next(l)) rd.fail("unexpected EOF in $Nodes");
        int edim, etag, param;
        long nn;
        {
          std::istringstream is(l.text);
          if (!(is >> edim >> etag >> param >> nn)) rd.fail(l.number, "malformed node block");
        }
        std::vector<long> tags(nn);
        for (long i = 0; i < nn; ++i) {
          if (!rd.next(l)) rd.fail("unexpected EOF in $Nodes");
          tags[i] = std::stol(l.text);
        }
        for (long i = 0; i < nn; ++i) {
          if (!rd.next(l)) rd.fail("unexpected EOF in $Nodes");
          std::istringstream is(l.text);
          Real x, y, z;
          if (!(is >> x >> y >> z)) rd.fail(l.number, "malformed node coordinates");
          raw_nodes[tags[i]] = {x, y, z};
        }
      }
    } else if (l.text == "$Elements") {
      if (!rd.next(l)) rd.fail("unexpected EOF in $Elements");
      long nblocks, ntotal, mn, mx;
      {
        std::istringstream is(l.text);
        if (!(is >> nblocks >> ntotal >> mn >> mx))
          rd.fail(l.number, "malformed $Elements header");
      }
      for (long b = 0; b < nblocks; ++b) {
        if (!rd.next(l)) rd.fail("unexpected EOF in $Elements");
        int edim, etag, type;
        long ne;
        {
          std::istringstream is(l.text);
          if (!(is >> edim >> etag >> type >> ne)) rd.fail(l.number, "malformed element block");
        }
        const int nn = type_nnodes(type);
        if (nn < 0) {
          std::ostringstream os;
          os << "unsupported element type " << type;
          rd.fail(l.number, os.str());
        }
        int phys = 0;
        auto it = entity_phys.find({edim, etag});
        if (it != entity_phys.end()) phys = it->second;
        for (long i = 0; i < ne; ++i) {
          if (!rd.next(l)) rd.fail("unexpected EOF in $Elements");
          std::istringstream is(l.text);
          long id;
          if (!(is >> id)) rd.fail(l.number, "malformed element line");
          RawElement e;
          e.type = type;
          e.phys = phys;
          for (int k = 0; k < nn; ++k) {
            long nid;
            if (!(is >> nid)) rd.fail(l.number, "missing element node");
            e.nodes.push_back(nid);
          }
          raw_elems.push_back(std::move(e));
        }
      }
    }
  }
  return assemble(raw_nodes, raw_elems, names, rd);
}

} // namespace

Mesh read_gmsh(std::istream& in, const std::string& origin) {
  LineReader rd(in, origin);
  Line l;
  if (!rd.next(l) || l.text != "$MeshFormat")
    rd.fail("expected $MeshFormat");
  if (!rd.next(l)) rd.fail("unexpected EOF in $MeshFormat");
  std::istringstream is(l.text);
  double version;
  int binary;
  if (!(is >> version >> binary)) rd.fail("malformed $MeshFormat line");
  if (binary != 0) rd.fail("binary MSH files are not supported");
  if (!rd.next(l) || l.text != "$EndMeshFormat") rd.fail("expected $EndMeshFormat");
  if (version >= 4.0 && version < 5.0) return read_msh4(rd);
  if (version >= 2.0 && version < 3.0) return read_msh2(rd);
  rd.fail("unsupported MSH version (expected 2.2 or 4.1)");
}

Mesh read_gmsh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file: " + path);
  return read_gmsh(in, path);
}

namespace {

int element_msh_type(const MeshElement& el) {
  if (el.shape == Shape::line) return el.geom_degree == 2 ? 8 : 1;
  if (el.shape == Shape::triangle) return el.geom_degree == 2 ? 9 : 2;
  return el.geom_degree == 2 ? 10 : 3;
}

} // namespace

void write_gmsh(const Mesh& m, std::ostream& out) {
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  if (!m.tag_names.empty()) {
    out << "$PhysicalNames\n" << m.tag_names.size() << "\n";
    for (const auto& [tag, name] : m.tag_names)
      out << (m.dim - 1) << " " << tag << " \"" << name << "\"\n";
    out << "$EndPhysicalNames\n";
  }
  const int nn = static_cast<int>(m.nodes.size()) / m.dim;
  out << "$Nodes\n" << nn << "\n";
  out.precision(17);
  for (int i = 0; i < nn; ++i) {
    out << (i + 1);
    for (int k = 0; k < m.dim; ++k) out << " " << m.node(i)[k];
    for (int k = m.dim; k < 3; ++k) out << " 0";
    out << "\n";
  }
  out << "$EndNodes\n";

  long ne = m.n_elements();
  std::vector<const MeshFace*> tagged;
  for (const auto& f : m.faces)
    if (!f.interior() && f.btag != 0) tagged.push_back(&f);
  out << "$Elements\n" << (ne + static_cast<long>(tagged.size())) << "\n";
  long id = 1;
  for (const MeshFace* f : tagged) {
    const MeshElement& el = m.elements[f->elem_in];
    if (m.dim == 1) {
      out << id++ << " 15 2 " << f->btag << " 0 "
          << (el.nodes[f->face_in == 0 ? 0 : 1] + 1) << "\n";
    } else {
      const int nc = el.n_corners();
      const int a = el.nodes[f->face_in], b = el.nodes[(f->face_in + 1) % nc];
      if (el.geom_degree == 2) {
        const int mid = el.nodes[nc + f->face_in];
        out << id++ << " 8 2 " << f->btag << " 0 " << (a + 1) << " " << (b + 1)
            << " " << (mid + 1) << "\n";
      } else {
        out << id++ << " 1 2 " << f->btag << " 0 " << (a + 1) << " " << (b + 1) << "\n";
      }
    }
  }
  for (const auto& el : m.elements) {
    out << id++ << " " << element_msh_type(el) << " 2 0 0";
    for (int nid : el.nodes) out << " " << (nid + 1);
    out << "\n";
  }
  out << "$EndElements\n";
}

void write_gmsh_file(const Mesh& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open file for writing: " + path);
  write_gmsh(m, out);
}

} // namespace rxdg::mesh
