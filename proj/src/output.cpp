#include "rxdg/output.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "rxdg/errors.hpp"

namespace rxdg::cli {

namespace {

int n_corners(basis::Shape s) {
  switch (s) {
    case basis::Shape::line: return 2;
    case basis::Shape::triangle: return 3;
    case basis::Shape::quadrilateral: return 4;
    default: return 0;
  }
}

int vtk_cell_type(basis::Shape s) {
  switch (s) {
    case basis::Shape::line: return 3;       // VTK_LINE
    case basis::Shape::triangle: return 5;   // VTK_TRIANGLE
    case basis::Shape::quadrilateral: return 9;  // VTK_QUAD
    default: return 0;
  }
}

std::vector<std::array<Real, 2>> corner_ref_coords(basis::Shape s) {
  switch (s) {
    case basis::Shape::line: return {{-1, 0}, {1, 0}};
    case basis::Shape::triangle: return {{0, 0}, {1, 0}, {0, 1}};
    case basis::Shape::quadrilateral: return {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    default: return {};
  }
}

} // namespace

void write_vtk(const std::string& path, const driver::RunState& s,
               const dg::TransportOperator& op,
               const std::vector<std::string>& fields) {
  const dg::Field& f = s.field;
  const mesh::Mesh& msh = op.msh();
  const thermo::GasModel& gm = op.gas();
  const StateLayout lay = f.layout();
  const int ne = msh.n_elements();

  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  out << std::setprecision(12);

  int total_pts = 0, total_ids = 0;
  for (int e = 0; e < ne; ++e) {
    total_pts += n_corners(msh.elements[e].shape);
    total_ids += n_corners(msh.elements[e].shape) + 1;
  }

  out << "# vtk DataFile Version 3.0\nrxdg fields t=" << s.t
      << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << total_pts << " double\n";
  for (int e = 0; e < ne; ++e) {
    const auto& el = msh.elements[e];
    const basis::NodalBasis gb = basis::NodalBasis::geometry(el.shape, el.geom_degree);
    const auto gn = msh.element_geom_nodes(e);
    std::vector<Real> phi(gb.n_basis());
    for (const auto& cr : corner_ref_coords(el.shape)) {
      gb.eval(cr.data(), phi.data());
      Real x[2] = {0, 0};
      for (int m = 0; m < gb.n_basis(); ++m)
        for (int k = 0; k < msh.dim; ++k) x[k] += gn[m * msh.dim + k] * phi[m];
      out << x[0] << " " << (msh.dim > 1 ? x[1] : 0.0) << " 0\n";
    }
  }
  out << "CELLS " << ne << " " << total_ids << "\n";
  int base = 0;
  for (int e = 0; e < ne; ++e) {
    const int nc = n_corners(msh.elements[e].shape);
    out << nc;
    for (int c = 0; c < nc; ++c) out << " " << (base + c);
    out << "\n";
    base += nc;
  }
  out << "CELL_TYPES " << ne << "\n";
  for (int e = 0; e < ne; ++e) out << vtk_cell_type(msh.elements[e].shape) << "\n";

  // per-corner sampled quantities
  struct PtData {
    std::string name;
    int ncomp;
    std::vector<Real> vals;
  };
  std::vector<PtData> pdata;
  for (const auto& name : fields) {
    if (name == "nu_av" || name == "theta") continue;  // cell data
    pdata.push_back({name, name == "v" ? 3 : 1, {}});
  }

  std::vector<Real> pstar_corner;
  for (int e = 0; e < ne; ++e) {
    const auto& el = msh.elements[e];
    const auto& sb = f.elem_basis(e);
    std::vector<Real> phi(sb.n_basis());
    // node offset of this element in the flat pstar array
    int node_base = 0;
    for (int q = 0; q < e; ++q) node_base += f.n_nodes(q);
    for (const auto& cr : corner_ref_coords(el.shape)) {
      sb.eval(cr.data(), phi.data());
      MixtureState y(lay);
      Real ps = 0;
      for (int j = 0; j < sb.n_basis(); ++j) {
        for (int c = 0; c < lay.ncomp(); ++c) y.u[c] += phi[j] * f.node_state(e, j)[c];
        if (!s.pstar.empty()) ps += phi[j] * s.pstar[node_base + j];
      }
      pstar_corner.push_back(ps);
      const thermo::StateProps pr = thermo::evaluate_ext(gm, y);
      Real Csum = 0;
      for (int i = 0; i < lay.n_species; ++i) Csum += y.C(i);
      for (auto& pd : pdata) {
        if (pd.name == "rho") pd.vals.push_back(pr.rho);
        else if (pd.name == "P") pd.vals.push_back(pr.P);
        else if (pd.name == "T") pd.vals.push_back(pr.T);
        else if (pd.name == "s") pd.vals.push_back(pr.s);
        else if (pd.name == "Pstar") pd.vals.push_back(pstar_corner.back());
        else if (pd.name == "v") {
          for (int k = 0; k < 3; ++k)
            pd.vals.push_back(k < lay.dim ? y.rho_v(k) / pr.rho : 0.0);
        } else if (pd.name.rfind("X_", 0) == 0) {
          const int i = gm.index(pd.name.substr(2));
          pd.vals.push_back(i >= 0 && Csum > 0 ? y.C(i) / Csum : 0.0);
        } else {
          pd.vals.push_back(0.0);
        }
      }
    }
  }

  out << "POINT_DATA " << total_pts << "\n";
  for (const auto& pd : pdata) {
    if (pd.ncomp == 1) {
      out << "SCALARS " << pd.name << " double 1\nLOOKUP_TABLE default\n";
      for (Real v : pd.vals) out << v << "\n";
    } else {
      out << "VECTORS " << pd.name << " double\n";
      for (size_t i = 0; i < pd.vals.size(); i += 3)
        out << pd.vals[i] << " " << pd.vals[i + 1] << " " << pd.vals[i + 2] << "\n";
    }
  }

  out << "CELL_DATA " << ne << "\n";
  out << "SCALARS rho_avg double 1\nLOOKUP_TABLE default\n";
  for (int e = 0; e < ne; ++e) {
    const StateVec avg = op.element_average(f, e);
    Real rho = 0;
    for (int i = 0; i < lay.n_species; ++i)
      rho += gm.species[i].W * avg[lay.species(i)];
    out << rho << "\n";
  }
  if (!op.nu_av().empty()) {
    out << "SCALARS nu_av double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < ne; ++e) out << op.nu_av()[e] << "\n";
  }
}

void write_audit_header(std::ostream& out, const chem::ReactionMechanism* mech) {
  out << "t,mass,energy";
  if (mech)
    for (const auto& en : mech->element_names) out << ",N_" << en;
  out << ",min_T,min_s\n";
}

void write_audit_row(std::ostream& out, Real t, const driver::AuditReport& a) {
  out << std::setprecision(17) << t << "," << a.mass << "," << a.energy;
  for (Real n : a.atoms) out << "," << n;
  out << "," << a.min_T << "," << a.min_s << "\n";
}

AuditSummary summarize_audit(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("audit CSV: empty file");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  if (cols.size() < 5 || cols[0] != "t" || cols[1] != "mass" || cols[2] != "energy")
    throw ParseError("audit CSV: unexpected header");
  const int n_atoms = static_cast<int>(cols.size()) - 5;

  AuditSummary sum;
  std::vector<Real> ref;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<Real> row;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) row.push_back(std::stod(c));
    if (row.size() != cols.size()) throw ParseError("audit CSV: ragged row");
    if (ref.empty()) ref = row;
    ++sum.rows;
    auto rel = [](Real v, Real r) { return r != 0 ? std::abs(v - r) / std::abs(r) : 0.0; };
    sum.max_mass_err = std::max(sum.max_mass_err, rel(row[1], ref[1]));
    sum.max_energy_err = std::max(sum.max_energy_err, rel(row[2], ref[2]));
    for (int k = 0; k < n_atoms; ++k)
      sum.max_atom_err = std::max(sum.max_atom_err, rel(row[3 + k], ref[3 + k]));
    sum.min_T = std::min(sum.min_T, row[3 + n_atoms]);
    sum.min_s = std::min(sum.min_s, row[4 + n_atoms]);
  }
  return sum;
}

AuditSummary summarize_audit_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open audit file: " + path);
  return summarize_audit(in);
}

} // namespace rxdg::cli
