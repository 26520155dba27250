#pragma once

#include <array>
#include <span>

#include <Eigen/Dense>

#include "rxdg/mesh.hpp"
#include "rxdg/thermo.hpp"

namespace rxdg::limiter {

/// Evaluation table of the limiter point set D_kappa (volume quadrature
/// points plus all face trace points) and quadrature averaging weights.
struct PointSet {
  Eigen::MatrixXd phi;           // n_pts x n_b basis values
  Eigen::VectorXd avg_weights;   // length n_b; <y> = sum_j w_j y_j, sums to 1

  int npts() const { return static_cast<int>(phi.rows()); }
  int n_basis() const { return static_cast<int>(phi.cols()); }
};

enum class Constraint { none, density, concentration, temperature, entropy };

struct InGResult {
  bool admissible = true;
  Constraint violated = Constraint::none;
};

/// Membership query for G_sigma: rho > 0, C_i >= 0, rho u* > 0,
/// chi_sigma >= 0 (checked in that order; first violation reported).
InGResult in_G(const thermo::GasModel& gm, const MixtureState& y,
               const thermo::AdmissibleParams& params);

struct LimiterReport {
  std::array<Real, 4> theta{1, 1, 1, 1};
  std::array<bool, 4> activated{false, false, false, false};
  Real s_bound_used = 0;
};

/// Four-stage linear-scaling limiter: (1) positive density, (2) nonnegative
/// concentrations, (3) positive shifted internal energy, (4) entropy bound.
/// Stages 1-2 contract concentration polynomials about their averages;
/// stages 3-4 contract the full state. Element averages are preserved and
/// the returned coefficients satisfy in_G at every point of D_kappa.
/// Throws AverageInadmissible when the element average itself violates the
/// bounds (caller should shrink dt or abort).
LimiterReport limit_element(const thermo::GasModel& gm, StateLayout layout,
                            std::span<Real> elem_coeffs, const PointSet& D,
                            const thermo::AdmissibleParams& params);

/// Minimum entropy over D_kappa of the element and its face neighbors
/// (previous-step data), given per-element minima.
Real entropy_bound_local(const mesh::Mesh& msh, std::span<const Real> elem_min_s,
                         int e);

/// Global bound: minimum over all element minima.
Real entropy_bound_global(std::span<const Real> elem_min_s);

} // namespace rxdg::limiter
