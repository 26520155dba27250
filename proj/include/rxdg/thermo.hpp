#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rxdg/errors.hpp"
#include "rxdg/state.hpp"

namespace rxdg::thermo {

/// One fitted temperature range of the internal-energy polynomial
/// u_i(T) = sum_k b[k] T^k (J/kg). The entropy fit carries its own
/// integration constant; h_const is an optional enthalpy offset kept for
/// data converted from other fit conventions (normally zero, since b[0]
/// already contains the formation contribution).
struct CaloricRange {
  Real T_lo = 0;
  Real T_hi = 0;
  std::vector<Real> b;
  Real h_const = 0;
  Real s_const = 0;
};

struct SpeciesThermo {
  std::string name;
  Real W = 0;  // kg/kmol
  std::vector<CaloricRange> ranges;
  Real u0 = 0;  // zero-kelvin offset: b[0] of the lowest range

  /// Range containing T; ties at a breakpoint go to the lower range.
  const CaloricRange& range_for(Real T) const;
  bool in_range(Real T) const;
  Real T_lo() const { return ranges.front().T_lo; }
  Real T_hi() const { return ranges.back().T_hi; }

  Real u(Real T) const;
  Real cv(Real T) const;
  Real s_fit(Real T, Real R0) const;  // standard-state entropy fit, J/(kg K)
  Real h(Real T, Real R0) const;

  // Extended evaluations: clamp to the fitted span and continue with a
  // constant-c_v linear tail. Used where robustness beats fit validity
  // (limiter queries, reaction sub-steps on transiently cold states).
  Real u_ext(Real T) const;
  Real cv_ext(Real T) const;
  Real s_fit_ext(Real T, Real R0) const;
};

/// Immutable after load; safe to share across element-parallel loops.
struct GasModel {
  std::vector<SpeciesThermo> species;
  Real R0 = 8314.4621;     // J/(kmol K)
  Real P_ref = 101325.0;   // Pa, entropy reference pressure

  int n_species() const { return static_cast<int>(species.size()); }
  int index(std::string_view name) const;  // -1 if absent
  Real W(int i) const { return species[i].W; }

  /// Temperature span valid for every species (intersection of fits).
  Real T_min() const;
  Real T_max() const;

  /// Enforces the load-time invariants: positive molecular weights,
  /// contiguous ordered ranges, c_v > 0 sampled across each range,
  /// unique names. Throws ValidationError.
  void validate() const;
};

struct AdmissibleParams {
  Real eps = 1e-10;  // positivity floor
  Real sigma = 0;    // entropy lower bound, J/(kg K)
};

struct MixtureProps {
  Real u, c_v, c_p, h, P;
};

/// Mixture caloric properties and pressure at a given composition and
/// temperature. C in kmol/m^3.
MixtureProps mixture_props(const GasModel& gm, std::span<const Real> C, Real T);

/// Mixture-averaged specific entropy s = sum Y_i s_i with
/// s_i = s_i_fit(T) - (R0/W_i) ln(X_i P / P_ref); species with C_i = 0
/// contribute nothing (0 log 0 = 0).
Real mixture_entropy(const GasModel& gm, std::span<const Real> C, Real T, Real P);

Real density(const GasModel& gm, std::span<const Real> C);

/// Inverts u(T) = e_t - |v|^2/2 with Newton + bisection fallback.
/// Converges to |u(T) - u_target| <= 1e-10 |u_target| + 1e-8 J/kg.
/// Throws NoRoot when the internal energy lies outside the fitted span.
Real temperature_from_state(const GasModel& gm, const MixtureState& y, Real T_hint = 0);

/// Same inversion on the extended fits; returns a nonpositive-temperature
/// sentinel via NoRoot only when even the linear tail has no root.
Real temperature_from_state_ext(const GasModel& gm, const MixtureState& y, Real T_hint = 0);

struct ShiftedQuantities {
  Real u_star;       // u - sum Y_i b_i0, J/kg
  Real Z;            // rho^2 u* = rho * rho e_t - |rho v|^2/2 - rho^2 u_0
  Real rho_u_star;
};

/// Algebraic in y: no temperature solve involved.
ShiftedQuantities shifted_quantities(const GasModel& gm, const MixtureState& y);

/// chi_sigma = rho s - rho sigma. Strict fits; propagates inversion errors.
Real entropy_density_chi(const GasModel& gm, const MixtureState& y, Real sigma);

/// chi on the extended fits; never throws for rho > 0 states (states whose
/// extended temperature is nonpositive get a huge negative chi).
Real entropy_density_chi_ext(const GasModel& gm, const MixtureState& y, Real sigma,
                             Real T_hint = 0);

/// Frozen speed of sound sqrt(c_p/c_v * P/rho).
Real sound_speed(const GasModel& gm, const MixtureState& y);

/// Everything at once for hot paths (single temperature solve).
struct StateProps {
  Real rho, T, u, P, s, c_v, c_p, c;
};
StateProps evaluate(const GasModel& gm, const MixtureState& y, Real T_hint = 0);
StateProps evaluate_ext(const GasModel& gm, const MixtureState& y, Real T_hint = 0);

Real entropy_from_state(const GasModel& gm, const MixtureState& y);
Real entropy_from_state_ext(const GasModel& gm, const MixtureState& y, Real T_hint = 0);

/// Sentinel returned by the extended entropy paths for states with no
/// recoverable temperature; bound computations skip such values.
inline constexpr Real kEntropySentinel = -1e30;

/// Builds the conservative state for given primitive data (concentrations,
/// velocity, temperature).
MixtureState state_from_primitive(const GasModel& gm, StateLayout layout,
                                  std::span<const Real> C,
                                  std::span<const Real> v, Real T);

} // namespace rxdg::thermo
