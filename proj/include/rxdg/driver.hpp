#pragma once

#include <optional>

#include "rxdg/chemistry.hpp"
#include "rxdg/residual.hpp"

namespace rxdg::driver {

enum class LimiterMode { entropy_local, entropy_global, positivity_only, clipping };
enum class TimeScheme { ssprk2, ssprk3 };

struct DriverOptions {
  LimiterMode limiter = LimiterMode::entropy_local;
  TimeScheme scheme = TimeScheme::ssprk2;
  Real eps = 1e-10;
  Real cfl = 0.1;
  Real retry_shrink = 0.5;
  chem::ReactionStepConfig reaction;
  int n_threads = 1;
};

struct AuditReport {
  Real mass = 0, energy = 0;
  std::vector<Real> atoms;
  Real mass_err = 0, energy_err = 0;
  std::vector<Real> atom_errs;
  Real min_T = 0, min_s = 0;
};

struct RunState {
  Real t = 0;
  long step_count = 0;
  dg::Field field;
  // t = 0 references for the conservation audit
  Real mass0 = 0, energy0 = 0;
  std::vector<Real> atoms0;
  // running pointwise maximum of pressure at the solution nodes
  std::vector<Real> pstar;
  // diagnostics
  Real run_min_T = 1e300;
  long retry_count = 0;
  long limiter_activations = 0;
  int entropy_flags = 0;

  explicit RunState(dg::Field f) : field(std::move(f)) {}
};

/// Orchestrates SSPRK stages with per-stage limiting, Strang splitting
/// around the reaction step, CFL-based dt with violation-triggered retry,
/// and conservation audits.
class Driver {
public:
  Driver(const dg::TransportOperator* op, const chem::ReactionMechanism* mech,
         DriverOptions opt);

  const DriverOptions& options() const { return opt_; }

  /// Initializes audit references and P* from the current field.
  void start(RunState& s) const;

  /// One SSP-RK transport step with per-stage limiting; throws
  /// AverageInadmissible when an element average leaves G.
  void ssprk2_step(RunState& s, Real dt) const;

  /// Strang split: transport dt/2, reaction dt, transport dt/2.
  void strang_advance(RunState& s, Real dt) const;

  /// dt = cfl min_k h_k / ((2p+1) max |v|+c).
  Real compute_dt(const RunState& s, Real cfl) const;

  /// Attempts a step (transport or Strang when a mechanism is attached),
  /// restarting with dt * retry_shrink on admissibility violations down to
  /// the Theorem-1 floor. Returns the dt actually used.
  Real retry_on_violation(RunState& s, Real dt) const;

  AuditReport conservation_audit(const RunState& s) const;

  /// Tracks the running max-pressure history and run minimum temperature.
  void update_pointwise_diagnostics(RunState& s) const;

  /// Per-element sigma bounds for the current step, from step-start data.
  std::vector<Real> entropy_bounds(const dg::Field& f) const;

  /// Applies the configured limiter to every element (or clips).
  void limit_all(RunState& s, const std::vector<Real>& sigma) const;

  /// Nodal temperature minimum of the current field.
  Real min_nodal_temperature(const dg::Field& f) const;

  const dg::TransportOperator& op() const { return *op_; }

private:
  void transport_step(RunState& s, Real dt) const;
  void reaction_substep(RunState& s, Real dt) const;

  const dg::TransportOperator* op_;
  const chem::ReactionMechanism* mech_;
  DriverOptions opt_;
};

} // namespace rxdg::driver
