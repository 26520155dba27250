#include "rxdg/flux.hpp"

#include <cmath>

#include "rxdg/errors.hpp"

namespace rxdg::dg {

SideProps side_props(const thermo::GasModel& gm, const MixtureState& y,
                     const Real* n, Real T_hint) {
  const thermo::StateProps pr = thermo::evaluate_ext(gm, y, T_hint);
  if (!(pr.P > 0) || !std::isfinite(pr.c))
    throw InadmissibleInput("hllc_flux: side state has nonphysical pressure");
  Real vn = 0;
  for (int k = 0; k < y.layout.dim; ++k) vn += y.rho_v(k) / pr.rho * n[k];
  return {pr.rho, vn, pr.P, pr.c};
}

StateVec flux_dot_n(const MixtureState& y, Real rho, Real P, const Real* n) {
  const StateLayout lay = y.layout;
  StateVec f(lay.ncomp(), 0.0);
  Real vn = 0;
  for (int k = 0; k < lay.dim; ++k) vn += y.rho_v(k) / rho * n[k];
  for (int k = 0; k < lay.dim; ++k) f[lay.mom(k)] = y.rho_v(k) * vn + P * n[k];
  f[lay.energy()] = vn * (y.rho_et() + P);
  for (int i = 0; i < lay.n_species; ++i) f[lay.species(i)] = vn * y.C(i);
  return f;
}

namespace {

/// HLLC star-region state U*_K scaled from U_K.
StateVec star_state(const MixtureState& y, const SideProps& K, Real SK, Real Sstar,
                    const Real* n) {
  const StateLayout lay = y.layout;
  const Real fac = (SK - K.vn) / (SK - Sstar);
  StateVec u(lay.ncomp(), 0.0);
  for (int k = 0; k < lay.dim; ++k)
    u[lay.mom(k)] = fac * (y.rho_v(k) + K.rho * (Sstar - K.vn) * n[k]);
  const Real e_term = y.rho_et() / K.rho +
                      (Sstar - K.vn) * (Sstar + K.P / (K.rho * (SK - K.vn)));
  u[lay.energy()] = fac * K.rho * e_term;
  for (int i = 0; i < lay.n_species; ++i) u[lay.species(i)] = fac * y.C(i);
  return u;
}

} // namespace

StateVec hllc_flux(const MixtureState& yL, const MixtureState& yR, const Real* n,
                   const SideProps& L, const SideProps& R) {
  const Real vbar = 0.5 * (L.vn + R.vn);
  const Real cbar = 0.5 * (L.c + R.c);
  const Real SL = std::min(L.vn - L.c, vbar - cbar);
  const Real SR = std::max(R.vn + R.c, vbar + cbar);

  if (SL >= 0) return flux_dot_n(yL, L.rho, L.P, n);
  if (SR <= 0) return flux_dot_n(yR, R.rho, R.P, n);

  const Real num = R.P - L.P + L.rho * L.vn * (SL - L.vn) - R.rho * R.vn * (SR - R.vn);
  const Real den = L.rho * (SL - L.vn) - R.rho * (SR - R.vn);
  if (den == 0) throw InadmissibleInput("hllc_flux: degenerate wave configuration");
  const Real Sstar = num / den;

  const StateLayout lay = yL.layout;
  StateVec f(lay.ncomp(), 0.0);
  if (Sstar >= 0) {
    const StateVec fl = flux_dot_n(yL, L.rho, L.P, n);
    const StateVec us = star_state(yL, L, SL, Sstar, n);
    for (int c = 0; c < lay.ncomp(); ++c) f[c] = fl[c] + SL * (us[c] - yL.u[c]);
  } else {
    const StateVec fr = flux_dot_n(yR, R.rho, R.P, n);
    const StateVec us = star_state(yR, R, SR, Sstar, n);
    for (int c = 0; c < lay.ncomp(); ++c) f[c] = fr[c] + SR * (us[c] - yR.u[c]);
  }
  for (int c = 0; c < lay.ncomp(); ++c)
    if (!std::isfinite(f[c])) throw InadmissibleInput("hllc_flux: non-finite flux");
  return f;
}

StateVec hllc_flux(const thermo::GasModel& gm, const MixtureState& yL,
                   const MixtureState& yR, const Real* n) {
  return hllc_flux(yL, yR, n, side_props(gm, yL, n), side_props(gm, yR, n));
}

Real directional_wave_speed(const thermo::GasModel& gm, const MixtureState& y,
                            const Real* n) {
  const SideProps s = side_props(gm, y, n);
  return std::abs(s.vn) + s.c;
}

Real max_wave_speed(const thermo::GasModel& gm, const MixtureState& y) {
  const thermo::StateProps pr = thermo::evaluate_ext(gm, y);
  Real v2 = 0;
  for (int k = 0; k < y.layout.dim; ++k) {
    const Real v = y.rho_v(k) / pr.rho;
    v2 += v * v;
  }
  return std::sqrt(v2) + pr.c;
}

MixtureState mirror_state(const MixtureState& y, const Real* n) {
  MixtureState m = y;
  Real rvn = 0;
  for (int k = 0; k < y.layout.dim; ++k) rvn += y.rho_v(k) * n[k];
  for (int k = 0; k < y.layout.dim; ++k) m.rho_v(k) = y.rho_v(k) - 2 * rvn * n[k];
  return m;
}

} // namespace rxdg::dg
