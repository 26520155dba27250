#include "rxdg/chemistry.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "rxdg/errors.hpp"
#include "rxdg/mesh.hpp"
#include "rxdg/quadrature.hpp"

namespace rxdg::chem {

void ReactionMechanism::validate(const thermo::GasModel& gm) const {
  const int ns = gm.n_species();
  for (const auto& row : atom_matrix)
    if (static_cast<int>(row.size()) != ns)
      throw ValidationError("mechanism: atom matrix column count mismatch");
  for (size_t r = 0; r < reactions.size(); ++r) {
    for (int e = 0; e < n_elements(); ++e) {
      Real net = 0;
      for (auto [i, nu] : reactions[r].products) net += atom_matrix[e][i] * nu;
      for (auto [i, nu] : reactions[r].reactants) net -= atom_matrix[e][i] * nu;
      if (std::abs(net) > 1e-10)
        throw ValidationError("mechanism: reaction " + std::to_string(r + 1) +
                              " does not conserve element " + element_names[e]);
    }
    if (!reactions[r].tb_eff.empty() &&
        static_cast<int>(reactions[r].tb_eff.size()) != ns)
      throw ValidationError("mechanism: third-body efficiency count mismatch");
  }
}

namespace {

Real safe_exp(Real x) { return std::exp(std::clamp(x, -600.0, 600.0)); }

/// Molar Gibbs free energy of species i at standard pressure, J/kmol.
Real gibbs_molar(const thermo::GasModel& gm, int i, Real T) {
  const auto& sp = gm.species[i];
  const Real h = sp.u_ext(T) + gm.R0 / sp.W * T +
                 sp.range_for(std::clamp(T, sp.T_lo(), sp.T_hi())).h_const;
  const Real s = sp.s_fit_ext(T, gm.R0);
  return sp.W * (h - T * s);
}

} // namespace

void production_rates(const thermo::GasModel& gm, const ReactionMechanism& mech,
                      std::span<const Real> C, Real T, std::span<Real> omega) {
  const int ns = gm.n_species();
  for (int i = 0; i < ns; ++i) omega[i] = 0;
  if (!(T > 0)) throw TemperatureOutOfRange("production_rates: nonpositive temperature");

  const Real RT = gm.R0 * T;
  const Real logT = std::log(T);
  // standard-state concentration for equilibrium constants
  const Real c0 = gm.P_ref / RT;

  std::vector<Real> g(ns);
  bool have_g = false;

  for (const auto& rx : mech.reactions) {
    const Real kf = rx.A * safe_exp(rx.beta * logT - rx.Ea / RT);
    Real qf = kf;
    for (auto [i, nu] : rx.reactants) {
      Real Ci = std::max(C[i], 0.0);
      for (int k = 0; k < static_cast<int>(nu); ++k) qf *= Ci;
    }
    Real qr = 0;
    if (rx.reversible) {
      if (!have_g) {
        for (int i = 0; i < ns; ++i) g[i] = gibbs_molar(gm, i, T);
        have_g = true;
      }
      Real dG = 0, dnu = 0;
      for (auto [i, nu] : rx.products) {
        dG += nu * g[i];
        dnu += nu;
      }
      for (auto [i, nu] : rx.reactants) {
        dG -= nu * g[i];
        dnu -= nu;
      }
      const Real Kc = std::pow(c0, dnu) * safe_exp(-dG / RT);
      const Real kr = kf / Kc;
      qr = kr;
      for (auto [i, nu] : rx.products) {
        Real Ci = std::max(C[i], 0.0);
        for (int k = 0; k < static_cast<int>(nu); ++k) qr *= Ci;
      }
    }
    Real q = qf - qr;
    if (rx.third_body) {
      Real M = 0;
      for (int i = 0; i < ns; ++i)
        M += (rx.tb_eff.empty() ? 1.0 : rx.tb_eff[i]) * std::max(C[i], 0.0);
      q *= M;
    }
    for (auto [i, nu] : rx.reactants) omega[i] -= nu * q;
    for (auto [i, nu] : rx.products) omega[i] += nu * q;
  }
}

namespace {

struct NodeOde {
  const thermo::GasModel* gm;
  const ReactionMechanism* mech;
  StateLayout lay;
  Real rho_et, ke_half;  // |rho v|^2 / 2, fixed during reaction
  Real T_hint;

  /// Temperature at composition C with fixed momentum/energy.
  Real temperature(std::span<const Real> C) {
    MixtureState y(lay);
    y.rho_et() = rho_et;
    // momenta enter only through the fixed kinetic term; fold into a clean
    // state for the inverter
    for (int i = 0; i < lay.n_species; ++i) y.C(i) = C[i];
    if (lay.dim > 0) y.rho_v(0) = std::sqrt(2 * ke_half);
    const Real T = thermo::temperature_from_state_ext(*gm, y, T_hint);
    T_hint = T;
    return T;
  }

  void rates(std::span<const Real> C, std::span<Real> w) {
    production_rates(*gm, *mech, C, temperature(C), w);
  }
};

} // namespace

ReactionStepReport reaction_step(const thermo::GasModel& gm,
                                 const ReactionMechanism& mech,
                                 const ReactionStepConfig& cfg, StateLayout layout,
                                 std::span<Real> elem_coeffs, int n_nodes, Real dt) {
  const int ns = layout.n_species;
  const int m = layout.ncomp();
  ReactionStepReport rep;
  const bool midpoint = cfg.integrator == ReactionStepConfig::Integrator::implicit_midpoint;

  Eigen::VectorXd G(ns), W(ns);
  Eigen::MatrixXd J(ns, ns);

  for (int node = 0; node < n_nodes; ++node) {
    Real* u = &elem_coeffs[node * m];
    NodeOde ode{&gm, &mech, layout, u[layout.energy()], 0.0, 0.0};
    Real ke = 0;
    for (int k = 0; k < layout.dim; ++k)
      ke += u[layout.mom(k)] * u[layout.mom(k)];
    ode.ke_half = 0.5 * ke;

    Eigen::VectorXd C0(ns);
    for (int i = 0; i < ns; ++i) C0(i) = u[layout.species(i)];
    Real Cscale = 0;
    for (int i = 0; i < ns; ++i) Cscale = std::max(Cscale, std::abs(C0(i)));
    if (Cscale == 0) continue;

    const Real s_before = [&] {
      MixtureState y0(layout, std::span<const Real>(u, m));
      return thermo::entropy_from_state_ext(gm, y0);
    }();

    // rate evaluations on trial iterates can leave the thermodynamically
    // solvable region; that fails the attempt rather than escaping
    auto rates_checked = [&](std::span<const Real> Cq, std::span<Real> wq) {
      try {
        ode.rates(Cq, wq);
        return true;
      } catch (const Error&) {
        return false;
      }
    };

    // skip chemically frozen nodes
    {
      std::vector<Real> w0(ns);
      if (!rates_checked(std::span<const Real>(C0.data(), ns), w0)) continue;
      Real wmax = 0;
      for (int i = 0; i < ns; ++i) wmax = std::max(wmax, std::abs(w0[i]));
      if (wmax * dt < 1e-14 * Cscale) continue;
    }

    // one implicit stage of size h from Cin; Newton with a lagged
    // finite-difference Jacobian
    auto solve_stage = [&](const Eigen::VectorXd& Cin, Real h, Eigen::VectorXd& Cout) {
      Cout = Cin;
      bool have_J = false;
      for (int it = 0; it < 25; ++it) {
        Eigen::VectorXd Cmid = midpoint ? (0.5 * (Cin + Cout)).eval() : Cout;
        if (!rates_checked(std::span<const Real>(Cmid.data(), ns),
                           std::span<Real>(W.data(), ns)))
          return false;
        G = Cout - Cin - h * W;
        Real gn = 0;
        for (int i = 0; i < ns; ++i) gn = std::max(gn, std::abs(G(i)));
        if (!std::isfinite(gn)) return false;
        if (gn <= cfg.newton_tol * Cscale) {
          for (int i = 0; i < ns; ++i) {
            if (Cout(i) < -1e-11 * Cscale) return false;
            if (Cout(i) < 0) Cout(i) = 0;  // roundoff-level only
          }
          return true;
        }
        if (!have_J || it % 4 == 3) {
          Eigen::VectorXd wp(ns);
          for (int jcol = 0; jcol < ns; ++jcol) {
            Eigen::VectorXd Cp = Cmid;
            const Real dstep = std::max(1e-7 * std::abs(Cp(jcol)), 1e-13 * Cscale);
            Cp(jcol) += dstep;
            if (!rates_checked(std::span<const Real>(Cp.data(), ns),
                               std::span<Real>(wp.data(), ns)))
              return false;
            for (int irow = 0; irow < ns; ++irow)
              J(irow, jcol) = (wp(irow) - W(irow)) / dstep;
          }
          J *= midpoint ? 0.5 * h : h;
          for (int i = 0; i < ns; ++i) J(i, i) -= 1.0;
          have_J = true;
        }
        const Eigen::VectorXd dx = J.partialPivLu().solve(G);
        if (!dx.allFinite()) return false;
        Cout += dx;
      }
      return false;
    };

    // step-doubling controller on top of the implicit stages
    const int order = midpoint ? 2 : 1;
    const Real err_div = std::pow(2.0, order) - 1.0;
    Real t = 0;
    Real h = dt;
    long local_steps = 0;
    Eigen::VectorXd Cf(ns), Ch1(ns), Ch2(ns);
    while (t < dt * (1 - 1e-14)) {
      h = std::min(h, dt - t);
      ++local_steps;
      if (local_steps > cfg.max_substeps)
        throw StiffSolveFailure("reaction_step: substep budget exhausted");
      const bool ok = solve_stage(C0, h, Cf) && solve_stage(C0, 0.5 * h, Ch1) &&
                      solve_stage(Ch1, 0.5 * h, Ch2);
      if (!ok) {
        h *= 0.5;
        if (h < 1e-16 * dt)
          throw StiffSolveFailure("reaction_step: Newton stalled");
        continue;
      }
      Real err = 0;
      for (int i = 0; i < ns; ++i)
        err = std::max(err, std::abs(Cf(i) - Ch2(i)) / err_div);
      const Real tol = cfg.rel_tol * Cscale;
      if (err <= tol) {
        // Richardson extrapolation; mass-conserving since both solutions
        // conserve, rejected if it creates meaningful negatives
        Eigen::VectorXd Cr = (std::pow(2.0, order) * Ch2 - Cf) / err_div;
        bool ok_r = true;
        for (int i = 0; i < ns; ++i)
          if (Cr(i) < -1e-11 * Cscale) ok_r = false;
        if (ok_r)
          for (int i = 0; i < ns; ++i) C0(i) = std::max(Cr(i), 0.0);
        else
          C0 = Ch2;
        t += h;
      }
      const Real fac = err > 0 ? 0.9 * std::pow(tol / err, 1.0 / (order + 1)) : 4.0;
      h *= std::clamp(fac, 0.2, 4.0);
    }
    rep.total_substeps += local_steps;

    for (int i = 0; i < ns; ++i) u[layout.species(i)] = C0(i);
    MixtureState yf(layout, std::span<const Real>(u, m));
    const Real s_after = thermo::entropy_from_state_ext(gm, yf);
    if (s_after < s_before - cfg.entropy_slack) ++rep.entropy_flags;
    try {
      rep.min_T = std::min(rep.min_T, thermo::temperature_from_state_ext(gm, yf));
    } catch (const Error&) {
    }
  }
  return rep;
}

ReactionStepReport reaction_step_p_hat(const thermo::GasModel& gm,
                                       const ReactionMechanism& mech,
                                       const ReactionStepConfig& cfg,
                                       StateLayout layout,
                                       std::span<Real> elem_coeffs,
                                       basis::Shape shape, int p, int geom_degree,
                                       std::span<const Real> geom_nodes, Real dt) {
  const int p_hat = cfg.p_hat;
  if (p_hat <= p)
    throw ValidationError("reaction_step_p_hat: p_hat must exceed p");
  const int m = layout.ncomp();
  const basis::NodalBasis bp = basis::NodalBasis::solution(shape, p);
  const basis::NodalBasis bh = basis::NodalBasis::solution(shape, p_hat);
  const int nb = bp.n_basis(), na = bh.n_basis();
  const int d = bp.dim();

  // interpolate the degree-p field at the p_hat nodes
  std::vector<Real> up(na * m, 0.0);
  std::vector<Real> phi(nb);
  for (int a = 0; a < na; ++a) {
    Real xi[2] = {0, 0};
    for (int k = 0; k < d; ++k) xi[k] = bh.node(a, k);
    bp.eval(xi, phi.data());
    for (int j = 0; j < nb; ++j)
      for (int c = 0; c < m; ++c) up[a * m + c] += phi[j] * elem_coeffs[j * m + c];
  }

  ReactionStepReport rep =
      reaction_step(gm, mech, cfg, layout, up, na, dt);

  // L2 projection back to degree p with a rule exact for phi_p * phi_hat * |J|
  const int order = p + p_hat + 2 * geom_degree;
  const mesh::ReferenceElement ref =
      mesh::build_reference(shape, std::max(p, (order - 1) / 2), geom_degree, order, order);
  const mesh::ElementGeometry g = mesh::map_and_metrics(ref, geom_nodes);
  const int nq = ref.vol_rule.npts();

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nb, m);
  std::vector<Real> php(nb), phh(na);
  for (int q = 0; q < nq; ++q) {
    Real xi[2] = {0, 0};
    for (int k = 0; k < d; ++k) xi[k] = ref.vol_rule.pt(q, k);
    bp.eval(xi, php.data());
    bh.eval(xi, phh.data());
    const Real jw = g.jac_det[q] * ref.vol_rule.weights[q];
    for (int i = 0; i < nb; ++i) {
      for (int j = 0; j < nb; ++j) M(i, j) += jw * php[i] * php[j];
      for (int c = 0; c < m; ++c) {
        Real val = 0;
        for (int a = 0; a < na; ++a) val += phh[a] * up[a * m + c];
        rhs(i, c) += jw * php[i] * val;
      }
    }
  }
  const Eigen::MatrixXd X = M.llt().solve(rhs);
  for (int j = 0; j < nb; ++j)
    for (int c = 0; c < m; ++c) elem_coeffs[j * m + c] = X(j, c);
  return rep;
}

std::vector<Real> atom_totals(const ReactionMechanism& mech, StateLayout layout,
                              std::span<const StateVec> elem_averages,
                              std::span<const Real> volumes) {
  std::vector<Real> N(mech.n_elements(), 0.0);
  for (size_t k = 0; k < elem_averages.size(); ++k)
    for (int e = 0; e < mech.n_elements(); ++e) {
      Real acc = 0;
      for (int i = 0; i < layout.n_species; ++i)
        acc += mech.atom_matrix[e][i] * elem_averages[k][layout.species(i)];
      N[e] += volumes[k] * acc;
    }
  return N;
}

MixtureState reactor_oracle(const thermo::GasModel& gm, const ReactionMechanism& mech,
                            const MixtureState& y0, Real t_end, int n_steps) {
  const int ns = y0.layout.n_species;
  MixtureState y = y0;
  std::vector<Real> C(ns), k1(ns), k2(ns), k3(ns), k4(ns), tmp(ns);
  for (int i = 0; i < ns; ++i) C[i] = y.C(i);
  const Real h = t_end / n_steps;

  auto rates = [&](std::span<const Real> Cc, std::span<Real> w) {
    MixtureState yt = y;
    for (int i = 0; i < ns; ++i) yt.C(i) = Cc[i];
    const Real T = thermo::temperature_from_state_ext(gm, yt);
    production_rates(gm, mech, Cc, T, w);
  };

  for (long s = 0; s < n_steps; ++s) {
    rates(C, k1);
    for (int i = 0; i < ns; ++i) tmp[i] = C[i] + 0.5 * h * k1[i];
    rates(tmp, k2);
    for (int i = 0; i < ns; ++i) tmp[i] = C[i] + 0.5 * h * k2[i];
    rates(tmp, k3);
    for (int i = 0; i < ns; ++i) tmp[i] = C[i] + h * k3[i];
    rates(tmp, k4);
    for (int i = 0; i < ns; ++i)
      C[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  for (int i = 0; i < ns; ++i) y.C(i) = std::max(C[i], 0.0);
  return y;
}

} // namespace rxdg::chem
