#pragma once

#include <functional>
#include <optional>

#include "rxdg/decomp.hpp"
#include "rxdg/field.hpp"
#include "rxdg/flux.hpp"
#include "rxdg/limiter.hpp"

namespace rxdg::dg {

enum class FluxInterp { standard, modified };

struct TransportOptions {
  FluxInterp interp = FluxInterp::standard;
  int vol_order = -1;   // defaults to 2p+1
  int face_order = -1;  // defaults to 2p+1
  bool artificial_viscosity = false;
  Real c_av = 0.5;
  Real av_kappa0 = 0.01;  // shock-sensor deadband
  int n_threads = 1;
};

/// Semi-discrete transport operator: assembles dy/dt = M^{-1} R(y) with the
/// weak-form volume flux integral, HLLC surface fluxes (optionally from the
/// pressure-equilibrium modified states), slip walls on boundary faces, and
/// element-local artificial dissipation (a volume term only, so element
/// averages never see it). Geometry, basis tables, limiter point sets, and
/// Theorem-1 ledgers are cached at construction and immutable.
class TransportOperator {
public:
  TransportOperator(const thermo::GasModel* gm, const mesh::Mesh* msh,
                    StateLayout layout, int p, TransportOptions opt);

  const thermo::GasModel& gas() const { return *gm_; }
  const mesh::Mesh& msh() const { return *mesh_; }
  StateLayout layout() const { return layout_; }
  int degree() const { return p_; }
  const TransportOptions& options() const { return opt_; }

  /// dy/dt coefficients; throws InadmissibleTraceState naming element, face
  /// and point when a trace state cannot form a flux.
  void residual(const Field& y, Field& dydt) const;

  const mesh::ElementGeometry& geometry(int e) const { return cache_[e].geom; }
  const limiter::PointSet& point_set(int e) const { return cache_[e].D; }
  const decomp::DecompLedger& ledger(int e) const { return cache_[e].ledger; }
  const mesh::ReferenceElement& reference(int e) const;

  /// Quadrature element averages of each conservative component.
  StateVec element_average(const Field& y, int e) const;

  /// min over D_kappa of the specific entropy, per element.
  std::vector<Real> element_min_entropy(const Field& y) const;

  /// max over solution nodes of |v| + c.
  Real element_wave_speed(const Field& y, int e) const;

  /// Largest wave speed over the trace points of an element's faces
  /// (both sides), for the Theorem-1 bound.
  Real element_trace_wave_speed(const Field& y, int e) const;

  /// min over elements of the Theorem-1 dt bound.
  Real theorem1_dt_floor(const Field& y) const;

  /// Artificial-viscosity coefficient of one element given the strong-form
  /// residual at the volume points (ncomp-major per point).
  Real artificial_viscosity(const Field& y, int e,
                            std::span<const Real> residual_strong) const;

  /// Strong-form divergence of the interpolated flux at the volume points.
  std::vector<Real> strong_residual(const Field& y, int e) const;

  /// Per-element nu_AV values from the latest residual() call (empty when AV
  /// is disabled).
  const std::vector<Real>& nu_av() const { return nu_av_; }

private:
  struct FaceSide {
    Eigen::MatrixXd phi;  // n_pts x n_b
  };
  struct ElemCache {
    int ref_id = 0;
    mesh::ElementGeometry geom;
    Eigen::MatrixXd phi_vol;               // nq x nb
    std::vector<Eigen::MatrixXd> dphi_vol; // per dim
    Eigen::LLT<Eigen::MatrixXd> mass;
    limiter::PointSet D;
    decomp::DecompLedger ledger;
    Real h = 0;
  };
  struct FaceCache {
    FaceSide in, out;  // out empty on boundary
  };

  struct TraceState {
    MixtureState y;
    Real T = 0, P = 0;
    bool have_tp = false;
  };

  TraceState trace_state(const Field& y, int e, const FaceSide& side, int l,
                         const std::vector<Real>& nodal_P) const;
  SideProps props_of(const TraceState& t, const Real* n) const;

  const thermo::GasModel* gm_;
  const mesh::Mesh* mesh_;
  StateLayout layout_;
  int p_;
  TransportOptions opt_;
  std::vector<mesh::ReferenceElement> refs_;
  std::vector<int> elem_ref_;
  std::vector<ElemCache> cache_;
  std::vector<FaceCache> fcache_;
  mutable std::vector<Real> nu_av_;
};

/// Runs fn(begin, end) over chunks of [0, n); honors RXDG_THREADS (or the
/// explicit thread count) with deterministic chunking.
void parallel_for(int n, int n_threads, const std::function<void(int, int)>& fn);

} // namespace rxdg::dg
