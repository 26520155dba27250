#include "rxdg/field.hpp"

#include <cmath>

#include "rxdg/errors.hpp"

namespace rxdg::dg {

Field::Field(const mesh::Mesh* msh, StateLayout layout, int p)
    : mesh_(msh), layout_(layout), p_(p) {
  basis_per_shape_.resize(4);
  offsets_.resize(mesh_->n_elements() + 1, 0);
  for (int e = 0; e < mesh_->n_elements(); ++e) {
    const auto shape = mesh_->elements[e].shape;
    auto& b = basis_per_shape_[static_cast<int>(shape)];
    if (!b) b = std::make_shared<basis::NodalBasis>(basis::NodalBasis::solution(shape, p));
    offsets_[e + 1] = offsets_[e] + b->n_basis() * layout_.ncomp();
  }
  data_.assign(offsets_.back(), 0.0);
}

const basis::NodalBasis& Field::elem_basis(int e) const {
  return *basis_per_shape_[static_cast<int>(mesh_->elements[e].shape)];
}

std::span<Real> Field::node_state(int e, int j) {
  return {&data_[offsets_[e] + j * layout_.ncomp()], static_cast<size_t>(layout_.ncomp())};
}

std::span<const Real> Field::node_state(int e, int j) const {
  return {&data_[offsets_[e] + j * layout_.ncomp()], static_cast<size_t>(layout_.ncomp())};
}

MixtureState Field::state(int e, int j) const {
  return MixtureState(layout_, node_state(e, j));
}

void Field::set_state(int e, int j, const MixtureState& y) {
  auto dst = node_state(e, j);
  for (int c = 0; c < layout_.ncomp(); ++c) dst[c] = y.u[c];
}

std::span<Real> Field::element_data(int e) {
  return {&data_[offsets_[e]], static_cast<size_t>(offsets_[e + 1] - offsets_[e])};
}

std::span<const Real> Field::element_data(int e) const {
  return {&data_[offsets_[e]], static_cast<size_t>(offsets_[e + 1] - offsets_[e])};
}

MixtureState interpolate(const Field& f, int e, const Real* xi) {
  const auto& b = f.elem_basis(e);
  std::vector<Real> phi(b.n_basis());
  b.eval(xi, phi.data());
  return interpolate(f, e, phi);
}

MixtureState interpolate(const Field& f, int e, std::span<const Real> phi) {
  const int m = f.layout().ncomp();
  MixtureState y(f.layout());
  for (int j = 0; j < static_cast<int>(phi.size()); ++j) {
    auto nj = f.node_state(e, j);
    for (int c = 0; c < m; ++c) y.u[c] += phi[j] * nj[c];
  }
  return y;
}

std::vector<Real> pressure_poly(const thermo::GasModel& gm, const Field& f, int e) {
  const int nb = f.n_nodes(e);
  std::vector<Real> P(nb);
  for (int j = 0; j < nb; ++j) {
    const MixtureState y = f.state(e, j);
    const Real T = thermo::temperature_from_state(gm, y);
    Real Csum = 0;
    for (int i = 0; i < f.layout().n_species; ++i) Csum += y.C(i);
    P[j] = gm.R0 * T * Csum;
  }
  return P;
}

MixtureState rebuild_from_pressure(const thermo::GasModel& gm,
                                   const MixtureState& y_interp, Real P_interp) {
  if (!(P_interp > 0))
    throw NonphysicalPressure("modified_state: interpolated pressure is nonpositive");
  const StateLayout lay = y_interp.layout;
  Real Csum = 0, rho = 0;
  for (int i = 0; i < lay.n_species; ++i) {
    Csum += y_interp.C(i);
    rho += gm.species[i].W * y_interp.C(i);
  }
  if (!(rho > 0)) throw ZeroDensity("modified_state: nonpositive density");
  const Real T = P_interp / (gm.R0 * Csum);
  Real rho_u = 0;
  for (int i = 0; i < lay.n_species; ++i) {
    if (y_interp.C(i) == 0) continue;
    rho_u += gm.species[i].W * y_interp.C(i) * gm.species[i].u_ext(T);
  }
  Real ke = 0;
  for (int k = 0; k < lay.dim; ++k) ke += y_interp.rho_v(k) * y_interp.rho_v(k);
  MixtureState yt = y_interp;
  yt.rho_et() = rho_u + 0.5 * ke / rho;
  return yt;
}

MixtureState modified_state(const thermo::GasModel& gm, const Field& f, int e,
                            const Real* xi) {
  const auto& b = f.elem_basis(e);
  // at a solution node the modification is exact; return the stored state
  const int d = b.dim();
  for (int j = 0; j < b.n_basis(); ++j) {
    Real dist = 0;
    for (int k = 0; k < d; ++k) dist = std::max(dist, std::abs(b.node(j, k) - xi[k]));
    if (dist < 1e-13) return f.state(e, j);
  }
  std::vector<Real> phi(b.n_basis());
  b.eval(xi, phi.data());
  const MixtureState y = interpolate(f, e, phi);
  const std::vector<Real> Pj = pressure_poly(gm, f, e);
  Real P = 0;
  for (int j = 0; j < b.n_basis(); ++j) P += phi[j] * Pj[j];
  return rebuild_from_pressure(gm, y, P);
}

} // namespace rxdg::dg
