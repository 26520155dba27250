#pragma once

#include "rxdg/thermo.hpp"

namespace rxdg::dg {

/// Primitive quantities one Riemann side needs.
struct SideProps {
  Real rho, vn, P, c;
};

SideProps side_props(const thermo::GasModel& gm, const MixtureState& y,
                     const Real* n, Real T_hint = 0);

/// Convective flux contracted with a unit normal, F(y) . n.
StateVec flux_dot_n(const MixtureState& y, Real rho, Real P, const Real* n);

/// HLLC flux. Consistent (F(y,y,n) = F(y).n) and conservative
/// (F(yL,yR,n) = -F(yR,yL,-n)). Wave speeds from |v.n| +- c with
/// arithmetic-average bounds; species rows upwind with the mass flux.
StateVec hllc_flux(const thermo::GasModel& gm, const MixtureState& yL,
                   const MixtureState& yR, const Real* n);

/// Variant with precomputed side properties (hot path).
StateVec hllc_flux(const MixtureState& yL, const MixtureState& yR, const Real* n,
                   const SideProps& L, const SideProps& R);

/// |v . n| + c at a state.
Real directional_wave_speed(const thermo::GasModel& gm, const MixtureState& y,
                            const Real* n);

/// |v| + c at a state.
Real max_wave_speed(const thermo::GasModel& gm, const MixtureState& y);

/// Slip-wall mirror state: normal momentum reflected, all else unchanged.
MixtureState mirror_state(const MixtureState& y, const Real* n);

} // namespace rxdg::dg
