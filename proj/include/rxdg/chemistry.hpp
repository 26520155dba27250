#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rxdg/basis.hpp"
#include "rxdg/thermo.hpp"

namespace rxdg::chem {

struct Reaction {
  std::vector<std::pair<int, Real>> reactants;  // (species index, stoich)
  std::vector<std::pair<int, Real>> products;
  Real A = 0;     // (m^3/kmol)^(order-1)/s, times T^beta
  Real beta = 0;
  Real Ea = 0;    // J/kmol
  bool reversible = true;
  bool third_body = false;
  std::vector<Real> tb_eff;  // per-species efficiency; empty means all 1
};

struct ReactionMechanism {
  std::vector<Reaction> reactions;
  std::vector<std::string> element_names;
  std::vector<std::vector<Real>> atom_matrix;  // [element][species]

  int n_elements() const { return static_cast<int>(element_names.size()); }

  /// Checks that every reaction conserves atoms. Throws ValidationError.
  void validate(const thermo::GasModel& gm) const;
};

/// Net molar production rates from mass-action kinetics with Arrhenius
/// forward rates and thermodynamically consistent reverse rates
/// (equilibrium constants from the Gibbs free energy of the fits).
void production_rates(const thermo::GasModel& gm, const ReactionMechanism& mech,
                      std::span<const Real> C, Real T, std::span<Real> omega);

struct ReactionStepConfig {
  enum class Integrator { implicit_midpoint, backward_euler };
  Integrator integrator = Integrator::implicit_midpoint;
  Real newton_tol = 1e-11;
  Real rel_tol = 1e-9;       // step-doubling accuracy target per substep
  int max_substeps = 20000;
  int p_hat = -1;            // elevated degree; <0 disables
  Real entropy_slack = 1e-9; // flag s decreases beyond this
};

struct ReactionStepReport {
  long total_substeps = 0;
  int entropy_flags = 0;  // nodes whose entropy decreased beyond the slack
  Real min_T = 1e300;
};

/// Advances the node-local reaction ODEs of one element by dt: momentum and
/// total energy density stay untouched, concentrations evolve by implicit
/// integration with Newton and adaptive substepping.
/// Throws StiffSolveFailure when the substep budget is exhausted.
ReactionStepReport reaction_step(const thermo::GasModel& gm,
                                 const ReactionMechanism& mech,
                                 const ReactionStepConfig& cfg, StateLayout layout,
                                 std::span<Real> elem_coeffs, int n_nodes, Real dt);

/// Reaction step on the nodes of an elevated degree p_hat followed by L2
/// projection back to degree p; the element average is preserved exactly up
/// to quadrature roundoff.
ReactionStepReport reaction_step_p_hat(const thermo::GasModel& gm,
                                       const ReactionMechanism& mech,
                                       const ReactionStepConfig& cfg,
                                       StateLayout layout,
                                       std::span<Real> elem_coeffs,
                                       basis::Shape shape, int p, int geom_degree,
                                       std::span<const Real> geom_nodes, Real dt);

/// Atom totals N_e = sum_k |k| sum_i a[e][i] <C_i>_k from element averages.
std::vector<Real> atom_totals(const ReactionMechanism& mech, StateLayout layout,
                              std::span<const StateVec> elem_averages,
                              std::span<const Real> volumes);

/// 0-D constant-volume reactor integrated with fine explicit RK4 steps in
/// extended precision; reference oracle for the implicit path.
MixtureState reactor_oracle(const thermo::GasModel& gm, const ReactionMechanism& mech,
                            const MixtureState& y0, Real t_end, int n_steps);

} // namespace rxdg::chem
