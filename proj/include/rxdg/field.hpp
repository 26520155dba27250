#pragma once

#include <memory>
#include <vector>

#include "rxdg/basis.hpp"
#include "rxdg/mesh.hpp"
#include "rxdg/thermo.hpp"

namespace rxdg::dg {

/// Global nodal polynomial field: per element, the conservative state at the
/// degree-p solution nodes of its reference shape.
class Field {
public:
  Field(const mesh::Mesh* msh, StateLayout layout, int p);

  const mesh::Mesh& msh() const { return *mesh_; }
  StateLayout layout() const { return layout_; }
  int degree() const { return p_; }
  int n_elements() const { return mesh_->n_elements(); }

  const basis::NodalBasis& elem_basis(int e) const;
  int n_nodes(int e) const { return elem_basis(e).n_basis(); }

  std::span<Real> node_state(int e, int j);
  std::span<const Real> node_state(int e, int j) const;
  MixtureState state(int e, int j) const;
  void set_state(int e, int j, const MixtureState& y);

  std::span<Real> element_data(int e);
  std::span<const Real> element_data(int e) const;

  std::vector<Real>& data() { return data_; }
  const std::vector<Real>& data() const { return data_; }

private:
  const mesh::Mesh* mesh_;
  StateLayout layout_;
  int p_;
  std::vector<std::shared_ptr<const basis::NodalBasis>> basis_per_shape_;
  std::vector<int> offsets_;
  std::vector<Real> data_;
};

/// Lagrange interpolation of the conservative state at a reference point.
MixtureState interpolate(const Field& f, int e, const Real* xi);

/// Interpolation given precomputed basis values.
MixtureState interpolate(const Field& f, int e, std::span<const Real> phi);

/// Nodal pressure coefficients P_j = P(y_j) of the degree-p pressure
/// interpolant. All nodal states must be admissible.
std::vector<Real> pressure_poly(const thermo::GasModel& gm, const Field& f, int e);

/// State with the energy rebuilt from interpolated pressure and unmodified
/// concentrations: T = P_interp / (R0 sum C). At a solution node this is the
/// stored nodal state, bit for bit.
MixtureState modified_state(const thermo::GasModel& gm, const Field& f, int e,
                            const Real* xi);

/// Same rebuild from already-interpolated ingredients (hot path); node
/// snapping is the caller's concern.
MixtureState rebuild_from_pressure(const thermo::GasModel& gm,
                                   const MixtureState& y_interp, Real P_interp);

} // namespace rxdg::dg
