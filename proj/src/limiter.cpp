#include "rxdg/limiter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rxdg/errors.hpp"

namespace rxdg::limiter {

InGResult in_G(const thermo::GasModel& gm, const MixtureState& y,
               const thermo::AdmissibleParams& params) {
  Real rho = 0;
  for (int i = 0; i < y.layout.n_species; ++i) rho += gm.species[i].W * y.C(i);
  if (!(rho > 0)) return {false, Constraint::density};
  for (int i = 0; i < y.layout.n_species; ++i)
    if (y.C(i) < 0) return {false, Constraint::concentration};
  const auto sq = thermo::shifted_quantities(gm, y);
  if (!(sq.rho_u_star > 0)) return {false, Constraint::temperature};
  const Real chi = thermo::entropy_density_chi_ext(gm, y, params.sigma);
  if (!(chi >= 0)) return {false, Constraint::entropy};
  return {true, Constraint::none};
}

namespace {

struct Workspace {
  const thermo::GasModel* gm;
  StateLayout lay;
  std::span<Real> coef;  // n_b x m, node-major
  const PointSet* D;
  int nb, np, m;

  Real& coef_at(int j, int c) { return coef[j * m + c]; }

  /// Interpolated state at point q; the accumulation order matches what any
  /// caller interpolating from the same coefficients produces, so limiter
  /// decisions and in_G verdicts agree bit for bit.
  MixtureState point_state(int q) const {
    MixtureState y(lay);
    for (int j = 0; j < nb; ++j) {
      const Real ph = (*D).phi(q, j);
      for (int c = 0; c < m; ++c) y.u[c] += ph * coef[j * m + c];
    }
    return y;
  }
};

/// c_j <- center + th (c_j - center) for the selected components.
void contract(Workspace& w, std::span<const int> comps,
              std::span<const Real> centers, Real th) {
  for (int j = 0; j < w.nb; ++j)
    for (size_t k = 0; k < comps.size(); ++k) {
      Real& v = w.coef_at(j, comps[k]);
      v = centers[k] + th * (v - centers[k]);
    }
}

constexpr int kMaxPasses = 24;

} // namespace

LimiterReport limit_element(const thermo::GasModel& gm, StateLayout layout,
                            std::span<Real> elem_coeffs, const PointSet& D,
                            const thermo::AdmissibleParams& params) {
  Workspace w{&gm, layout, elem_coeffs, &D, D.n_basis(), D.npts(), layout.ncomp()};
  LimiterReport rep;
  rep.s_bound_used = params.sigma;
  const Real eps = params.eps;
  const int ns = layout.n_species;

  // fixed averages (conservation anchor)
  StateVec avg(w.m, 0.0);
  for (int j = 0; j < w.nb; ++j) {
    const Real aw = D.avg_weights(j);
    for (int c = 0; c < w.m; ++c) avg[c] += aw * w.coef[j * w.m + c];
  }

  Real rho_bar = 0;
  for (int i = 0; i < ns; ++i) rho_bar += gm.species[i].W * avg[layout.species(i)];
  if (!(rho_bar > eps))
    throw AverageInadmissible("limit_element: element-average density at or below the floor");
  // quadrature averages of vanishing species can land a few ulps below zero
  // (averaging weights are themselves quadrature values); clamp those,
  // reject substantive negatives
  Real Wmin = gm.species[0].W;
  for (int i = 1; i < ns; ++i) Wmin = std::min(Wmin, gm.species[i].W);
  const Real conc_tol = 1e-13 * rho_bar / Wmin;
  for (int i = 0; i < ns; ++i) {
    if (avg[layout.species(i)] < -conc_tol) {
      std::ostringstream os;
      os << "limit_element: negative element-average concentration (species "
         << gm.species[i].name << " = " << avg[layout.species(i)] << ", tol "
         << -conc_tol << ")";
      throw AverageInadmissible(os.str());
    }
    if (avg[layout.species(i)] < 0) avg[layout.species(i)] = 0.0;
  }
  const MixtureState ybar(layout, avg);
  const Real rho_ustar_bar = thermo::shifted_quantities(gm, ybar).rho_u_star;
  if (!(rho_ustar_bar > eps))
    throw AverageInadmissible("limit_element: element-average shifted energy at or below the floor");

  std::vector<int> conc_comps(ns);
  std::vector<Real> conc_centers(ns);
  for (int i = 0; i < ns; ++i) {
    conc_comps[i] = layout.species(i);
    conc_centers[i] = ybar.C(i);
  }
  std::vector<int> all_comps(w.m);
  for (int c = 0; c < w.m; ++c) all_comps[c] = c;
  std::vector<Real> all_centers(avg.data(), avg.data() + w.m);

  // Each stage applies the scaling formula, then re-checks with exactly the
  // evaluations in_G performs; extra passes only mop up roundoff at the
  // constraint boundary. floor_stage targets the eps floor (first pass) and a
  // strictly positive value thereafter; otherwise the target is qmin >= 0.
  auto run_stage = [&](auto qmin_of_field, Real bar, bool floor_stage,
                       std::span<const int> comps, std::span<const Real> centers,
                       int stage) {
    for (int pass = 0; pass < kMaxPasses; ++pass) {
      const Real qmin = qmin_of_field();
      const bool violated = floor_stage
                                ? (pass == 0 ? !(qmin > eps) : !(qmin > 0))
                                : !(qmin >= 0);
      if (!violated) break;
      Real th = floor_stage ? (bar - eps) / (bar - qmin)
                            : (bar == 0 ? 0.0 : bar / (bar - qmin));
      if (!(th < 1)) break;
      if (th < 0) th = 0;
      contract(w, comps, centers, th);
      rep.theta[stage] *= th;
      rep.activated[stage] = true;
      if (th == 0) break;
    }
  };

  // --- stage 1: positive density ---
  run_stage(
      [&] {
        Real rho_min = std::numeric_limits<Real>::max();
        for (int q = 0; q < w.np; ++q) {
          const MixtureState y = w.point_state(q);
          Real rho = 0;
          for (int i = 0; i < ns; ++i) rho += gm.species[i].W * y.C(i);
          rho_min = std::min(rho_min, rho);
        }
        return rho_min;
      },
      rho_bar, true, conc_comps, conc_centers, 0);

  Real T_hint = 0;
  try {
    T_hint = thermo::temperature_from_state_ext(gm, ybar);
  } catch (const Error&) {
  }

  // --- stage 2: nonnegative concentrations, species by species ---
  for (int i = 0; i < ns; ++i) {
    const Real Cbar = ybar.C(i);
    Real th_total = 1;
    bool active = false;
    for (int pass = 0; pass < kMaxPasses; ++pass) {
      Real Cmin = std::numeric_limits<Real>::max();
      for (int q = 0; q < w.np; ++q) {
        const MixtureState y = w.point_state(q);
        Cmin = std::min(Cmin, y.C(i));
      }
      if (Cmin >= 0) break;
      const Real th = Cbar == 0 ? 0.0 : Cbar / (Cbar - Cmin);
      const int comp[1] = {layout.species(i)};
      const Real ctr[1] = {Cbar};
      contract(w, comp, ctr, th);
      th_total *= th;
      active = true;
      if (th == 0) {
        for (int j = 0; j < w.nb; ++j) w.coef_at(j, layout.species(i)) = Cbar;
        break;
      }
    }
    rep.theta[1] = std::min(rep.theta[1], th_total);
    rep.activated[1] = rep.activated[1] || active;
  }

  // --- stage 3: positive shifted internal energy ---
  run_stage(
      [&] {
        Real zmin = std::numeric_limits<Real>::max();
        for (int q = 0; q < w.np; ++q) {
          const MixtureState y = w.point_state(q);
          Real rho = 0;
          for (int i = 0; i < ns; ++i) rho += gm.species[i].W * y.C(i);
          if (!(rho > 0)) return -std::numeric_limits<Real>::max();
          zmin = std::min(zmin, thermo::shifted_quantities(gm, y).rho_u_star);
        }
        return zmin;
      },
      rho_ustar_bar, true, all_comps, all_centers, 2);

  // --- stage 4: entropy constraint ---
  // Where a region is locally uniform the bound coincides with the data, so
  // chi sits at zero up to roundoff; only substantive average violations are
  // reported, and roundoff-level ones skip the stage.
  const Real chi_bar = thermo::entropy_density_chi_ext(gm, ybar, params.sigma, T_hint);
  const Real chi_tol = 1e-11 * rho_bar * std::max(1.0, std::abs(params.sigma));
  {
    bool need = false;
    for (int q = 0; q < w.np && !need; ++q) {
      const MixtureState y = w.point_state(q);
      need = !(thermo::entropy_density_chi_ext(gm, y, params.sigma, T_hint) >= 0);
    }
    if (need && chi_bar < -chi_tol)
      throw AverageInadmissible("limit_element: element-average entropy below the bound");
  }
  if (chi_bar > 0) {
    run_stage(
        [&] {
          Real chi_min = std::numeric_limits<Real>::max();
          for (int q = 0; q < w.np; ++q) {
            const MixtureState y = w.point_state(q);
            chi_min = std::min(chi_min,
                               thermo::entropy_density_chi_ext(gm, y, params.sigma, T_hint));
          }
          return chi_min;
        },
        chi_bar, false, all_comps, all_centers, 3);
  }

  return rep;
}

Real entropy_bound_local(const mesh::Mesh& msh, std::span<const Real> elem_min_s,
                         int e) {
  Real s = elem_min_s[e];
  for (int fid : msh.elem_faces[e]) {
    const mesh::MeshFace& f = msh.faces[fid];
    if (!f.interior()) continue;
    const int other = f.elem_in == e ? f.elem_out : f.elem_in;
    s = std::min(s, elem_min_s[other]);
  }
  return s;
}

Real entropy_bound_global(std::span<const Real> elem_min_s) {
  Real s = std::numeric_limits<Real>::max();
  for (Real v : elem_min_s) s = std::min(s, v);
  return s;
}

} // namespace rxdg::limiter
