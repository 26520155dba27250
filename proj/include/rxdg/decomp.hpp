#pragma once

#include <vector>

#include "rxdg/field.hpp"
#include "rxdg/limiter.hpp"
#include "rxdg/mesh.hpp"

namespace rxdg::decomp {

/// Convex-combination coefficients expressing the element average over
/// volume and face quadrature point values, plus the constraint scales of
/// the time-step bound. Faces are reordered internally so that the face
/// with the most quadrature points comes last; face_order maps the internal
/// index to the element's face index.
struct DecompLedger {
  std::vector<Real> theta_v;                 // per volume point
  std::vector<std::vector<Real>> theta_fl;   // [internal face][l], padded to N
  std::vector<std::vector<Real>> nu_fl;      // padded with zeros to N
  std::vector<int> face_order;
  std::vector<Real> face_area;               // internal order
  int N = 0;
  Real volume = 0, surface = 0;
  Real L_A = 0, L_B = 0, L_C = 0;

  Real theta_sum() const;
};

/// Computes theta coefficients for an element. When every face quadrature
/// point coincides with a volume quadrature point, volume weights are
/// reassigned directly; otherwise theta_fl = t nu_fl / |dk| with t chosen by
/// a golden-section search maximizing min(L_A, L_B, L_C) subject to
/// theta_v >= 0. Throws NoPositiveTheta when no feasible t exists.
DecompLedger compute_thetas(const mesh::ElementGeometry& elem, int p);

/// dt_max = |k| min(L_A, L_B, L_C) / (2 lambda).
Real dt_bound_general(const DecompLedger& ledger, Real lambda_max, Real volume);

/// Straight-sided simplification: requires constant per-face normals and
/// Jacobians and identical normalized face weights w_hat; throws
/// NotStraightSided otherwise.
Real dt_bound_straight(const mesh::ElementGeometry& elem,
                       std::span<const Real> w_hat, const DecompLedger& ledger,
                       Real lambda_max);

/// Exterior trace states for the oracle, indexed by the *element* face id
/// and the face quadrature point.
using ExteriorTraces = std::vector<std::vector<MixtureState>>;

struct OraclePair {
  StateVec avg_direct;
  StateVec avg_reconstructed;
};

/// Evaluates the forward-Euler average update two ways: directly from the
/// surface fluxes, and as the explicit convex combination of pointwise
/// values and three-point systems (A, B, C terms). Test harness for the
/// decomposition identity.
OraclePair decomposition_oracle(const thermo::GasModel& gm, const dg::Field& f,
                                int e, const mesh::ElementGeometry& g,
                                const DecompLedger& ledger,
                                const ExteriorTraces& exterior, Real dt);

/// Appendix-B threshold: for y in G and a flux difference with zero
/// concentration rows, any alpha > alpha* keeps Z(y - dF/alpha) positive.
Real alpha_star(const thermo::GasModel& gm, const MixtureState& y,
                const StateVec& dF);

// --- auxiliary polynomials on Gauss-Lobatto layouts ---

/// Nine-node Gauss-Lobatto quadrilateral: boundary nodes carry the modified
/// traces; the center value enforces the element average. Returns all nine
/// nodal states (corners 0-3, edge midpoints 4-7, center 8).
std::vector<MixtureState> aux_poly_quad(const mesh::ElementGeometry& g,
                                        std::span<const MixtureState> ytilde_bnd8,
                                        const MixtureState& ybar);

/// Seven-node triangle obtained by collapsing the nine-node quadrilateral;
/// boundary nodes 0-5 carry the traces, node 6 enforces the average.
std::vector<MixtureState> aux_poly_tri(const mesh::ElementGeometry& g,
                                       std::span<const MixtureState> ytilde_bnd6,
                                       const MixtureState& ybar);

/// Bi-unit square <-> bi-unit right triangle collapse maps.
void quad_to_tri(const Real* eta, Real* xi);
void tri_to_quad(const Real* xi, Real* eta);

/// Reference nodes of the degenerate seven-node triangle (bi-unit coords).
std::vector<std::array<Real, 2>> tri7_nodes();

struct FallbackResult {
  bool accepted = true;        // modified-interpolation average was admissible
  bool soft_candidate = false; // positivity held but the entropy bound failed
  MixtureState avg;            // average actually adopted
};

/// Acceptance test for the modified flux interpolation: evolve the element
/// average with the modified-state surface fluxes; if the result leaves
/// G_sigma, recompute the surface integral at node-coincident points (where
/// the modified and nodal states agree). Requires a tensor Gauss-Lobatto
/// nodal layout (quadrilaterals).
FallbackResult modified_flux_fallback(const thermo::GasModel& gm,
                                      const dg::Field& f, int e,
                                      const mesh::ElementGeometry& g,
                                      const ExteriorTraces& exterior_at_quad,
                                      const ExteriorTraces& exterior_at_nodes,
                                      Real dt,
                                      const thermo::AdmissibleParams& params);

} // namespace rxdg::decomp
