#include "rxdg/driver.hpp"

#include <algorithm>
#include <cmath>

#include "rxdg/errors.hpp"

namespace rxdg::driver {

Driver::Driver(const dg::TransportOperator* op, const chem::ReactionMechanism* mech,
               DriverOptions opt)
    : op_(op), mech_(mech), opt_(opt) {}

std::vector<Real> Driver::entropy_bounds(const dg::Field& f) const {
  const int ne = f.n_elements();
  std::vector<Real> sigma(ne, -1e300);
  if (opt_.limiter == LimiterMode::positivity_only ||
      opt_.limiter == LimiterMode::clipping)
    return sigma;
  const std::vector<Real> mins = op_->element_min_entropy(f);
  if (opt_.limiter == LimiterMode::entropy_global) {
    const Real s = limiter::entropy_bound_global(mins);
    std::fill(sigma.begin(), sigma.end(), s);
  } else {
    for (int e = 0; e < ne; ++e)
      sigma[e] = limiter::entropy_bound_local(op_->msh(), mins, e);
  }
  return sigma;
}

void Driver::limit_all(RunState& s, const std::vector<Real>& sigma) const {
  const int ne = s.field.n_elements();
  if (opt_.limiter == LimiterMode::clipping) {
    // baseline for comparison: negative concentrations set to zero
    const StateLayout lay = s.field.layout();
    for (int e = 0; e < ne; ++e)
      for (int j = 0; j < s.field.n_nodes(e); ++j) {
        auto u = s.field.node_state(e, j);
        for (int i = 0; i < lay.n_species; ++i)
          if (u[lay.species(i)] < 0) u[lay.species(i)] = 0;
      }
    return;
  }
  std::vector<std::string> errors(ne);
  std::vector<long> activations(ne, 0);
  dg::parallel_for(ne, opt_.n_threads, [&](int eb, int ee) {
    for (int e = eb; e < ee; ++e) {
      thermo::AdmissibleParams params{opt_.eps, sigma[e]};
      try {
        const limiter::LimiterReport rep = limiter::limit_element(
            op_->gas(), s.field.layout(), s.field.element_data(e),
            op_->point_set(e), params);
        for (bool a : rep.activated)
          if (a) ++activations[e];
      } catch (const Error& err) {
        errors[e] = err.what();
      }
    }
  });
  for (int e = 0; e < ne; ++e) {
    if (!errors[e].empty())
      throw AverageInadmissible("element " + std::to_string(e) + ": " + errors[e]);
    s.limiter_activations += activations[e];
  }
}

void Driver::ssprk2_step(RunState& s, Real dt) const {
  const std::vector<Real> sigma = entropy_bounds(s.field);
  dg::Field& u = s.field;
  const dg::Field u0 = u;
  dg::Field r(&op_->msh(), u.layout(), u.degree());

  auto euler_stage = [&](Real a0, Real a1, Real adt) {
    // u <- a0 u0 + a1 u + adt dt L(u)
    op_->residual(u, r);
    auto& ud = u.data();
    const auto& u0d = u0.data();
    const auto& rd = r.data();
    for (size_t k = 0; k < ud.size(); ++k)
      ud[k] = a0 * u0d[k] + a1 * ud[k] + adt * dt * rd[k];
    limit_all(s, sigma);
  };

  if (opt_.scheme == TimeScheme::ssprk2) {
    euler_stage(0.0, 1.0, 1.0);              // u1 = u0 + dt L(u0)
    euler_stage(0.5, 0.5, 0.5);              // u2 = 1/2 u0 + 1/2 (u1 + dt L(u1))
  } else {
    euler_stage(0.0, 1.0, 1.0);
    euler_stage(0.75, 0.25, 0.25);
    euler_stage(1.0 / 3, 2.0 / 3, 2.0 / 3);
  }
}

void Driver::transport_step(RunState& s, Real dt) const {
  ssprk2_step(s, dt);
}

void Driver::reaction_substep(RunState& s, Real dt) const {
  if (!mech_ || mech_->reactions.empty()) return;  // zero-rate: exact no-op
  const int ne = s.field.n_elements();
  const StateLayout lay = s.field.layout();

  // reaction entropy bound: minimum nodal entropy at the substep start
  std::vector<Real> sigma(ne, -1e300);
  const bool entropy_mode = opt_.limiter == LimiterMode::entropy_local ||
                            opt_.limiter == LimiterMode::entropy_global;
  std::vector<std::string> errors(ne);
  std::vector<int> flags(ne, 0);
  dg::parallel_for(ne, opt_.n_threads, [&](int eb, int ee) {
    for (int e = eb; e < ee; ++e) {
      try {
        if (entropy_mode) {
          Real smin = 1e300;
          for (int j = 0; j < s.field.n_nodes(e); ++j)
            smin = std::min(smin,
                            thermo::entropy_from_state_ext(op_->gas(), s.field.state(e, j)));
          sigma[e] = smin;
        }
        chem::ReactionStepReport rep;
        if (opt_.reaction.p_hat > s.field.degree()) {
          const auto& el = op_->msh().elements[e];
          rep = chem::reaction_step_p_hat(
              op_->gas(), *mech_, opt_.reaction, lay, s.field.element_data(e),
              el.shape, s.field.degree(), el.geom_degree,
              op_->msh().element_geom_nodes(e), dt);
        } else {
          rep = chem::reaction_step(op_->gas(), *mech_, opt_.reaction, lay,
                                    s.field.element_data(e), s.field.n_nodes(e), dt);
        }
        flags[e] = rep.entropy_flags;
      } catch (const Error& err) {
        errors[e] = err.what();
      }
    }
  });
  for (int e = 0; e < ne; ++e) {
    if (!errors[e].empty())
      throw StiffSolveFailure("element " + std::to_string(e) + ": " + errors[e]);
    s.entropy_flags += flags[e];
  }

  if (opt_.limiter != LimiterMode::clipping) limit_all(s, sigma);
}

void Driver::strang_advance(RunState& s, Real dt) const {
  transport_step(s, 0.5 * dt);
  reaction_substep(s, dt);
  transport_step(s, 0.5 * dt);
}

Real Driver::compute_dt(const RunState& s, Real cfl) const {
  const int p = s.field.degree();
  Real dt = 1e300;
  for (int e = 0; e < s.field.n_elements(); ++e) {
    const Real lam = op_->element_wave_speed(s.field, e);
    if (lam <= 0) continue;
    const Real h = op_->geometry(e).h();
    dt = std::min(dt, h / ((2 * p + 1) * lam));
  }
  return cfl * dt;
}

Real Driver::retry_on_violation(RunState& s, Real dt) const {
  const std::vector<Real> saved = s.field.data();
  const Real t_saved = s.t;
  Real dtc = dt;
  std::optional<Real> floor;  // Theorem-1 retry target, computed lazily
  std::string last_error;

  for (int attempt = 0; attempt < 64; ++attempt) {
    try {
      if (mech_)
        strang_advance(s, dtc);
      else
        ssprk2_step(s, dtc);
      s.t = t_saved + dtc;
      ++s.step_count;
      return dtc;
    } catch (const Error& err) {
      if (!dynamic_cast<const AverageInadmissible*>(&err) &&
          !dynamic_cast<const InadmissibleTraceState*>(&err))
        throw;
      last_error = err.what();
      s.field.data() = saved;
      s.t = t_saved;
      ++s.retry_count;
      if (!floor) floor = op_->theorem1_dt_floor(s.field);
      // Shrink toward the Theorem-1 floor first. The floor certifies a
      // single forward-Euler stage at step-start wave speeds; later RK
      // stages can briefly exceed those speeds, so a few shrinks below the
      // floor are allowed before giving up.
      if (dtc <= 1e-3 * std::min(dt, *floor))
        throw RetryExhausted("retry_on_violation: no admissible step size found (last: " +
                             last_error + ")");
      dtc = dtc > *floor ? std::max(dtc * opt_.retry_shrink, *floor)
                         : dtc * opt_.retry_shrink;
    }
  }
  throw RetryExhausted("retry_on_violation: attempt budget exhausted (last: " +
                       last_error + ")");
}

void Driver::start(RunState& s) const {
  // nodal sampling of discontinuous initial data can violate the bounds at
  // off-node points; the run starts from the limited field
  if (opt_.limiter != LimiterMode::clipping)
    limit_all(s, entropy_bounds(s.field));
  const AuditReport a = conservation_audit(s);
  s.mass0 = a.mass;
  s.energy0 = a.energy;
  s.atoms0 = a.atoms;
  int total_nodes = 0;
  for (int e = 0; e < s.field.n_elements(); ++e) total_nodes += s.field.n_nodes(e);
  s.pstar.assign(total_nodes, 0.0);
  update_pointwise_diagnostics(s);
}

void Driver::update_pointwise_diagnostics(RunState& s) const {
  const StateLayout lay = s.field.layout();
  int idx = 0;
  Real hint = 0;
  for (int e = 0; e < s.field.n_elements(); ++e)
    for (int j = 0; j < s.field.n_nodes(e); ++j, ++idx) {
      const MixtureState y = s.field.state(e, j);
      const Real T = thermo::temperature_from_state_ext(op_->gas(), y, hint);
      hint = T;
      Real Csum = 0;
      for (int i = 0; i < lay.n_species; ++i) Csum += y.C(i);
      const Real P = op_->gas().R0 * T * Csum;
      if (idx < static_cast<int>(s.pstar.size()))
        s.pstar[idx] = std::max(s.pstar[idx], P);
      s.run_min_T = std::min(s.run_min_T, T);
    }
}

Real Driver::min_nodal_temperature(const dg::Field& f) const {
  Real Tmin = 1e300, hint = 0;
  for (int e = 0; e < f.n_elements(); ++e)
    for (int j = 0; j < f.n_nodes(e); ++j) {
      const Real T = thermo::temperature_from_state_ext(op_->gas(), f.state(e, j), hint);
      hint = T;
      Tmin = std::min(Tmin, T);
    }
  return Tmin;
}

AuditReport Driver::conservation_audit(const RunState& s) const {
  const StateLayout lay = s.field.layout();
  const int ne = s.field.n_elements();
  AuditReport rep;
  std::vector<StateVec> avgs(ne);
  std::vector<Real> vols(ne);
  for (int e = 0; e < ne; ++e) {
    avgs[e] = op_->element_average(s.field, e);
    vols[e] = op_->geometry(e).volume;
    Real rho = 0;
    for (int i = 0; i < lay.n_species; ++i)
      rho += op_->gas().species[i].W * avgs[e][lay.species(i)];
    rep.mass += vols[e] * rho;
    rep.energy += vols[e] * avgs[e][lay.energy()];
  }
  if (mech_) rep.atoms = chem::atom_totals(*mech_, lay, avgs, vols);

  rep.min_T = 1e300;
  rep.min_s = 1e300;
  Real hint = 0;
  for (int e = 0; e < ne; ++e)
    for (int j = 0; j < s.field.n_nodes(e); ++j) {
      const MixtureState y = s.field.state(e, j);
      const Real T = thermo::temperature_from_state_ext(op_->gas(), y, hint);
      hint = T;
      rep.min_T = std::min(rep.min_T, T);
      rep.min_s = std::min(rep.min_s, thermo::entropy_from_state_ext(op_->gas(), y));
    }

  if (s.mass0 != 0) rep.mass_err = std::abs(rep.mass - s.mass0) / std::abs(s.mass0);
  if (s.energy0 != 0)
    rep.energy_err = std::abs(rep.energy - s.energy0) / std::abs(s.energy0);
  rep.atom_errs.resize(rep.atoms.size(), 0.0);
  for (size_t k = 0; k < rep.atoms.size() && k < s.atoms0.size(); ++k)
    if (s.atoms0[k] != 0)
      rep.atom_errs[k] = std::abs(rep.atoms[k] - s.atoms0[k]) / std::abs(s.atoms0[k]);
  return rep;
}

} // namespace rxdg::driver
