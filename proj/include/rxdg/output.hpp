#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rxdg/driver.hpp"

namespace rxdg::cli {

/// Legacy ASCII VTK unstructured grid: one cell per element (corner
/// vertices, discontinuous point data), nodal fields sampled at the corners,
/// cell data for averages and diagnostics.
void write_vtk(const std::string& path, const driver::RunState& s,
               const dg::TransportOperator& op,
               const std::vector<std::string>& fields);

/// Audit CSV: fixed documented header, one row per sample, full-precision
/// values, deterministic element-id summation order.
void write_audit_header(std::ostream& out, const chem::ReactionMechanism* mech);
void write_audit_row(std::ostream& out, Real t, const driver::AuditReport& a);

struct AuditSummary {
  Real max_mass_err = 0, max_energy_err = 0, max_atom_err = 0;
  Real min_T = 1e300, min_s = 1e300;
  int rows = 0;
};

/// Re-reads an audit CSV and reports the worst relative drifts against the
/// first row.
AuditSummary summarize_audit(std::istream& in);
AuditSummary summarize_audit_file(const std::string& path);

} // namespace rxdg::cli
