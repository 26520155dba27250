#include "rxdg/residual.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "rxdg/errors.hpp"

namespace rxdg::dg {

void parallel_for(int n, int n_threads, const std::function<void(int, int)>& fn) {
  int T = n_threads;
  if (T <= 0) {
    const char* env = std::getenv("RXDG_THREADS");
    T = env ? std::max(1, std::atoi(env)) : 1;
  }
  T = std::min(T, n);
  if (T <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (n + T - 1) / T;
  for (int t = 0; t < T; ++t) {
    const int b = t * chunk, e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back(fn, b, e);
  }
  for (auto& th : pool) th.join();
}

namespace {

int shape_id(basis::Shape s) { return static_cast<int>(s); }

} // namespace

TransportOperator::TransportOperator(const thermo::GasModel* gm,
                                     const mesh::Mesh* msh, StateLayout layout,
                                     int p, TransportOptions opt)
    : gm_(gm), mesh_(msh), layout_(layout), p_(p), opt_(opt) {
  if (opt_.vol_order < 0) opt_.vol_order = 2 * p + 1;
  if (opt_.face_order < 0) opt_.face_order = 2 * p + 1;

  // one reference element per shape/geometry-degree combination present
  std::map<std::pair<int, int>, int> ref_ids;
  elem_ref_.resize(mesh_->n_elements());
  for (int e = 0; e < mesh_->n_elements(); ++e) {
    const auto& el = mesh_->elements[e];
    auto key = std::make_pair(shape_id(el.shape), el.geom_degree);
    auto it = ref_ids.find(key);
    if (it == ref_ids.end()) {
      refs_.push_back(mesh::build_reference(el.shape, p, el.geom_degree,
                                            opt_.vol_order, opt_.face_order));
      it = ref_ids.emplace(key, static_cast<int>(refs_.size()) - 1).first;
    }
    elem_ref_[e] = it->second;
  }

  // per-element caches
  cache_.resize(mesh_->n_elements());
  std::vector<std::shared_ptr<basis::NodalBasis>> bases(4);
  auto sol_basis = [&](basis::Shape s) -> const basis::NodalBasis& {
    auto& b = bases[shape_id(s)];
    if (!b) b = std::make_shared<basis::NodalBasis>(basis::NodalBasis::solution(s, p));
    return *b;
  };

  for (int e = 0; e < mesh_->n_elements(); ++e) {
    ElemCache& c = cache_[e];
    c.ref_id = elem_ref_[e];
    const mesh::ReferenceElement& ref = refs_[c.ref_id];
    const auto& b = sol_basis(mesh_->elements[e].shape);
    const int nb = b.n_basis();
    const int d = ref.dim();
    const int nq = ref.vol_rule.npts();

    c.geom = mesh::map_and_metrics(ref, mesh_->element_geom_nodes(e));
    c.h = c.geom.h();

    c.phi_vol.resize(nq, nb);
    c.dphi_vol.assign(d, Eigen::MatrixXd(nq, nb));
    std::vector<Real> phi(nb), dphi(nb * d);
    const basis::NodalBasis gb = basis::NodalBasis::geometry(ref.shape, ref.geom_degree);
    for (int q = 0; q < nq; ++q) {
      Real xi[2] = {0, 0};
      for (int k = 0; k < d; ++k) xi[k] = ref.vol_rule.pt(q, k);
      b.eval(xi, phi.data());
      b.eval_grad(xi, dphi.data());
      Real x[2], J[4], det;
      c.geom.map_point(gb, xi, x, J, &det);
      // J^{-T} grad_xi
      for (int j = 0; j < nb; ++j) {
        c.phi_vol(q, j) = phi[j];
        if (d == 1) {
          c.dphi_vol[0](q, j) = dphi[j] / J[0];
        } else {
          const Real inv = 1.0 / det;
          const Real gx = dphi[j * 2], gy = dphi[j * 2 + 1];
          c.dphi_vol[0](q, j) = inv * (J[3] * gx - J[2] * gy);
          c.dphi_vol[1](q, j) = inv * (-J[1] * gx + J[0] * gy);
        }
      }
    }

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nb, nb);
    for (int q = 0; q < nq; ++q) {
      const Real jw = c.geom.jac_det[q] * ref.vol_rule.weights[q];
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) M(i, j) += jw * c.phi_vol(q, i) * c.phi_vol(q, j);
    }
    c.mass.compute(M);

    // limiter point set: volume points plus all face trace points, with the
    // quadrature averaging weights
    c.D.avg_weights = Eigen::VectorXd::Zero(nb);
    for (int q = 0; q < nq; ++q) {
      const Real w = c.geom.jac_det[q] * ref.vol_rule.weights[q] / c.geom.volume;
      for (int j = 0; j < nb; ++j) c.D.avg_weights(j) += w * c.phi_vol(q, j);
    }
    // volume points, face trace points, and the solution nodes themselves:
    // the reaction step advances nodal states, so they must come out of the
    // limiter admissible as well
    int n_trace = 0;
    for (int f = 0; f < ref.n_faces(); ++f) n_trace += ref.face_npts(f);
    c.D.phi.resize(nq + n_trace + nb, nb);
    for (int q = 0; q < nq; ++q)
      for (int j = 0; j < nb; ++j) c.D.phi(q, j) = c.phi_vol(q, j);
    int row = nq;
    for (int f = 0; f < ref.n_faces(); ++f)
      for (int l = 0; l < ref.face_npts(f); ++l, ++row) {
        Real xi[2] = {0, 0};
        ref.face_point(f, l, xi);
        b.eval(xi, phi.data());
        for (int j = 0; j < nb; ++j) c.D.phi(row, j) = phi[j];
      }
    for (int j = 0; j < nb; ++j, ++row)
      for (int k = 0; k < nb; ++k) c.D.phi(row, k) = k == j ? 1.0 : 0.0;

    c.ledger = decomp::compute_thetas(c.geom, p);
  }

  // per-face trace tables
  fcache_.resize(mesh_->n_faces());
  for (int fid = 0; fid < mesh_->n_faces(); ++fid) {
    const mesh::MeshFace& mf = mesh_->faces[fid];
    const mesh::ReferenceElement& ref_in = refs_[elem_ref_[mf.elem_in]];
    const int d = ref_in.dim();
    const int nl = ref_in.face_npts(mf.face_in);
    FaceCache& fc = fcache_[fid];

    auto fill_side = [&](FaceSide& side, int e, const mesh::ReferenceElement& ref,
                         int face, bool flip) {
      const auto& b = sol_basis(mesh_->elements[e].shape);
      const int nb = b.n_basis();
      side.phi.resize(nl, nb);
      std::vector<Real> phi(nb);
      for (int l = 0; l < nl; ++l) {
        Real zeta = ref_in.face_param(mf.face_in, l);
        if (flip) zeta = -zeta;
        Real xi[2] = {0, 0};
        ref.face_to_ref(face, zeta, xi);
        b.eval(xi, phi.data());
        for (int j = 0; j < nb; ++j) side.phi(l, j) = phi[j];
      }
    };

    fill_side(fc.in, mf.elem_in, ref_in, mf.face_in, false);
    if (mf.interior()) {
      const mesh::ReferenceElement& ref_out = refs_[elem_ref_[mf.elem_out]];
      fill_side(fc.out, mf.elem_out, ref_out, mf.face_out, mf.flip);

      // conformity check: matched physical points up to the periodic offset
      const basis::NodalBasis gb_out =
          basis::NodalBasis::geometry(ref_out.shape, ref_out.geom_degree);
      for (int l = 0; l < nl; ++l) {
        Real zeta = ref_in.face_param(mf.face_in, l);
        Real xi_in[2] = {0, 0}, xi_out[2] = {0, 0};
        ref_in.face_to_ref(mf.face_in, zeta, xi_in);
        ref_out.face_to_ref(mf.face_out, mf.flip ? -zeta : zeta, xi_out);
        Real xin[2], xout[2];
        cache_[mf.elem_in].geom.map_point(
            basis::NodalBasis::geometry(ref_in.shape, ref_in.geom_degree), xi_in,
            xin, nullptr, nullptr);
        cache_[mf.elem_out].geom.map_point(gb_out, xi_out, xout, nullptr, nullptr);
        Real err = 0;
        for (int k = 0; k < d; ++k)
          err = std::max(err, std::abs(xin[k] + mf.offset[k] - xout[k]));
        if (err > 1e-9 * cache_[mf.elem_in].h)
          throw NonconformingMesh(
              "transport operator: face trace points of the two sides do not coincide");
      }
    }
  }
}

const mesh::ReferenceElement& TransportOperator::reference(int e) const {
  return refs_[elem_ref_[e]];
}

StateVec TransportOperator::element_average(const Field& y, int e) const {
  const ElemCache& c = cache_[e];
  const int m = layout_.ncomp();
  const int nb = static_cast<int>(c.D.avg_weights.size());
  StateVec avg(m, 0.0);
  for (int j = 0; j < nb; ++j) {
    auto nj = y.node_state(e, j);
    for (int cc = 0; cc < m; ++cc) avg[cc] += c.D.avg_weights(j) * nj[cc];
  }
  return avg;
}

TransportOperator::TraceState TransportOperator::trace_state(
    const Field& y, int e, const FaceSide& side, int l,
    const std::vector<Real>& nodal_P) const {
  const int nb = static_cast<int>(side.phi.cols());
  const int m = layout_.ncomp();
  // snap to a solution node when the basis row is a cardinal vector
  int match = -1;
  for (int j = 0; j < nb; ++j) {
    const Real v = side.phi(l, j);
    if (std::abs(v - 1.0) < 1e-12) {
      if (match >= 0) { match = -2; break; }
      match = j;
    } else if (std::abs(v) > 1e-12) {
      match = -2;
      break;
    }
  }
  TraceState t;
  if (match >= 0) {
    t.y = y.state(e, match);
    t.P = nodal_P[match];
    Real Csum = 0;
    for (int i = 0; i < layout_.n_species; ++i) Csum += t.y.C(i);
    t.T = t.P / (gm_->R0 * Csum);
    t.have_tp = true;
    return t;
  }
  MixtureState yi(layout_);
  for (int j = 0; j < nb; ++j) {
    const Real ph = side.phi(l, j);
    auto nj = y.node_state(e, j);
    for (int c = 0; c < m; ++c) yi.u[c] += ph * nj[c];
  }
  if (opt_.interp == FluxInterp::modified) {
    Real P = 0;
    for (int j = 0; j < nb; ++j) P += side.phi(l, j) * nodal_P[j];
    if (P > 0) {
      t.y = rebuild_from_pressure(*gm_, yi, P);
      Real Csum = 0;
      for (int i = 0; i < layout_.n_species; ++i) Csum += t.y.C(i);
      t.T = P / (gm_->R0 * Csum);
      t.P = P;
      t.have_tp = true;
      return t;
    }
    // the pressure interpolant dips nonpositive across a severely
    // under-resolved front; use the nodal-consistent state at this point
  }
  t.y = yi;
  return t;
}

SideProps TransportOperator::props_of(const TraceState& t, const Real* n) const {
  if (!t.have_tp) return side_props(*gm_, t.y, n);
  Real rho = 0, Csum = 0, cv = 0;
  for (int i = 0; i < layout_.n_species; ++i) {
    const Real Ci = t.y.C(i);
    rho += gm_->species[i].W * Ci;
    Csum += Ci;
    if (Ci != 0) cv += gm_->species[i].W * Ci * gm_->species[i].cv_ext(t.T);
  }
  cv /= rho;
  const Real cp = cv + gm_->R0 * Csum / rho;
  Real vn = 0;
  for (int k = 0; k < layout_.dim; ++k) vn += t.y.rho_v(k) / rho * n[k];
  if (!(t.P > 0)) throw InadmissibleInput("hllc_flux: nonpositive trace pressure");
  return {rho, vn, t.P, std::sqrt(cp / cv * t.P / rho)};
}

void TransportOperator::residual(const Field& y, Field& dydt) const {
  const int ne = mesh_->n_elements();
  const int nfc = mesh_->n_faces();
  const int m = layout_.ncomp();
  const int d = mesh_->dim;

  std::vector<std::vector<Real>> nodal_P(ne);
  std::vector<Real> avg_T(ne, 0.0);
  if (opt_.artificial_viscosity)
    nu_av_.assign(ne, 0.0);
  else
    nu_av_.clear();

  // pass A: nodal pressures, volume flux term, artificial viscosity
  std::vector<std::string> errors(ne);
  parallel_for(ne, opt_.n_threads, [&](int eb, int ee) {
    for (int e = eb; e < ee; ++e) {
      try {
        const ElemCache& c = cache_[e];
        const mesh::ReferenceElement& ref = refs_[c.ref_id];
        const int nb = y.n_nodes(e);
        const int nq = ref.vol_rule.npts();

        // nodal temperatures/pressures
        std::vector<Real>& Pj = nodal_P[e];
        Pj.resize(nb);
        std::vector<Real> Tj(nb);
        Real hint = 0;
        std::vector<StateVec> Fj(nb);  // nodal flux, m x d flattened
        for (int j = 0; j < nb; ++j) {
          const MixtureState yj = y.state(e, j);
          const Real T = thermo::temperature_from_state_ext(*gm_, yj, hint);
          hint = T;
          Real Csum = 0, rho = 0;
          for (int i = 0; i < layout_.n_species; ++i) {
            Csum += yj.C(i);
            rho += gm_->species[i].W * yj.C(i);
          }
          Tj[j] = T;
          Pj[j] = gm_->R0 * T * Csum;
          if (!(Pj[j] > 0) || !(rho > 0))
            throw InadmissibleTraceState("nonphysical nodal state");
          if (opt_.artificial_viscosity) {
            Fj[j].resize(m * d);
            for (int k = 0; k < d; ++k) {
              Real nvec[2] = {0, 0};
              nvec[k] = 1;
              const StateVec fk = flux_dot_n(yj, rho, Pj[j], nvec);
              for (int c2 = 0; c2 < m; ++c2) Fj[j][k * m + c2] = fk[c2];
            }
          }
          avg_T[e] += T / nb;
        }

        // volume term: flux evaluated at the quadrature points from the
        // interpolated state (modified mode rebuilds its energy from the
        // interpolated pressure first)
        Eigen::MatrixXd R = Eigen::MatrixXd::Zero(nb, m);
        Real Thint = avg_T[e];
        for (int q = 0; q < nq; ++q) {
          const Real jw = c.geom.jac_det[q] * ref.vol_rule.weights[q];
          StateVec Fq(m * d, 0.0);
          MixtureState yq(layout_);
          Real Pq = 0;
          for (int j = 0; j < nb; ++j) {
            const Real ph = c.phi_vol(q, j);
            auto nj = y.node_state(e, j);
            for (int cc = 0; cc < m; ++cc) yq.u[cc] += ph * nj[cc];
            Pq += ph * Pj[j];
          }
          Real rho = 0;
          for (int i = 0; i < layout_.n_species; ++i)
            rho += gm_->species[i].W * yq.C(i);
          if (opt_.interp == FluxInterp::modified && p_ > 0 && Pq > 0) {
            yq = rebuild_from_pressure(*gm_, yq, Pq);
          } else {
            // standard interpolation: pressure from the interpolated state
            Real Csum = 0;
            for (int i = 0; i < layout_.n_species; ++i) Csum += yq.C(i);
            const Real T = thermo::temperature_from_state_ext(*gm_, yq, Thint);
            Thint = T;
            Pq = gm_->R0 * T * Csum;
          }
          if (!(Pq > 0) || !(rho > 0))
            throw InadmissibleTraceState("nonphysical volume quadrature state");
          for (int k = 0; k < d; ++k) {
            Real nvec[2] = {0, 0};
            nvec[k] = 1;
            const StateVec fk = flux_dot_n(yq, rho, Pq, nvec);
            for (int cc = 0; cc < m; ++cc) Fq[k * m + cc] = fk[cc];
          }
          for (int i = 0; i < nb; ++i)
            for (int k = 0; k < d; ++k) {
              const Real dp = c.dphi_vol[k](q, i);
              for (int cc = 0; cc < m; ++cc) R(i, cc) += jw * Fq[k * m + cc] * dp;
            }
        }

        // artificial viscosity coefficient
        if (opt_.artificial_viscosity && p_ >= 1) {
          std::vector<Real> Rs(nq * m, 0.0);
          for (int q = 0; q < nq; ++q)
            for (int j = 0; j < nb; ++j)
              for (int k = 0; k < d; ++k) {
                const Real dp = c.dphi_vol[k](q, j);
                for (int cc = 0; cc < m; ++cc)
                  Rs[q * m + cc] += dp * Fj[j][k * m + cc];
              }
          nu_av_[e] = artificial_viscosity(y, e, Rs);
        }

        auto out = dydt.element_data(e);
        for (int i = 0; i < nb; ++i)
          for (int cc = 0; cc < m; ++cc) out[i * m + cc] = R(i, cc);
      } catch (const Error& err) {
        std::ostringstream os;
        os << "element " << e << ": " << err.what();
        errors[e] = os.str();
      }
    }
  });
  for (int e = 0; e < ne; ++e)
    if (!errors[e].empty()) throw InadmissibleTraceState(errors[e]);

  // pass B: face fluxes into per-face buffers
  struct FaceBuf {
    std::vector<Real> flux;  // nl x m
  };
  std::vector<FaceBuf> fbuf(nfc);
  std::vector<std::string> ferrors(nfc);
  parallel_for(nfc, opt_.n_threads, [&](int fb, int fe) {
    for (int fid = fb; fid < fe; ++fid) {
      try {
        const mesh::MeshFace& mf = mesh_->faces[fid];
        const FaceCache& fc = fcache_[fid];
        const mesh::ElementGeometry& g = cache_[mf.elem_in].geom;
        const auto& fg = g.faces[mf.face_in];
        const int nl = static_cast<int>(fc.in.phi.rows());
        FaceBuf& buf = fbuf[fid];
        buf.flux.assign(nl * m, 0.0);

        for (int l = 0; l < nl; ++l) {
          const Real* n = &fg.normals[l * d];
          const TraceState tin = trace_state(y, mf.elem_in, fc.in, l, nodal_P[mf.elem_in]);
          TraceState tout;
          if (mf.interior()) {
            tout = trace_state(y, mf.elem_out, fc.out, l, nodal_P[mf.elem_out]);
          } else {
            tout = tin;
            tout.y = mirror_state(tin.y, n);
          }
          SideProps pin, pout;
          try {
            pin = props_of(tin, n);
            pout = props_of(tout, n);
          } catch (const Error& err) {
            std::ostringstream os;
            os << "face " << fid << " point " << l << ": " << err.what();
            throw InadmissibleTraceState(os.str());
          }
          const StateVec F = hllc_flux(tin.y, tout.y, n, pin, pout);
          for (int cc = 0; cc < m; ++cc) buf.flux[l * m + cc] = F[cc];
        }
      } catch (const Error& err) {
        ferrors[fid] = err.what();
      }
    }
  });
  for (int fid = 0; fid < nfc; ++fid)
    if (!ferrors[fid].empty()) throw InadmissibleTraceState(ferrors[fid]);

  // pass C: gather surface terms, AV volume term, apply inverse mass matrix
  parallel_for(ne, opt_.n_threads, [&](int eb, int ee) {
    for (int e = eb; e < ee; ++e) {
      const ElemCache& c = cache_[e];
      const mesh::ReferenceElement& ref = refs_[c.ref_id];
      const int nb = y.n_nodes(e);
      const int nq = ref.vol_rule.npts();
      auto acc = dydt.element_data(e);
      Eigen::MatrixXd R(nb, m);
      for (int i = 0; i < nb; ++i)
        for (int cc = 0; cc < m; ++cc) R(i, cc) = acc[i * m + cc];

      for (int fid : mesh_->elem_faces[e]) {
        const mesh::MeshFace& mf = mesh_->faces[fid];
        const FaceCache& fc = fcache_[fid];
        const FaceBuf& buf = fbuf[fid];
        const auto& fg = cache_[mf.elem_in].geom.faces[mf.face_in];
        const bool owner = mf.elem_in == e;
        const FaceSide& side = owner ? fc.in : fc.out;
        const Real sgn = owner ? -1.0 : 1.0;
        const int nl = static_cast<int>(fc.in.phi.rows());
        for (int l = 0; l < nl; ++l) {
          const Real nu = fg.nu[l];
          for (int i = 0; i < nb; ++i) {
            const Real ph = side.phi(l, i) * nu;
            for (int cc = 0; cc < m; ++cc)
              R(i, cc) += sgn * ph * buf.flux[l * m + cc];
          }
        }
      }

      // element-local artificial dissipation: a pure volume term, so element
      // averages (and with them the admissibility analysis) are untouched
      if (opt_.artificial_viscosity && nu_av_[e] > 0) {
        for (int q = 0; q < nq; ++q) {
          const Real jw = c.geom.jac_det[q] * ref.vol_rule.weights[q] * nu_av_[e];
          for (int k = 0; k < d; ++k) {
            for (int cc = 0; cc < m; ++cc) {
              Real grad = 0;
              for (int j = 0; j < nb; ++j)
                grad += c.dphi_vol[k](q, j) * y.node_state(e, j)[cc];
              for (int i = 0; i < nb; ++i)
                R(i, cc) -= jw * grad * c.dphi_vol[k](q, i);
            }
          }
        }
      }

      const Eigen::MatrixXd X = c.mass.solve(R);
      for (int i = 0; i < nb; ++i)
        for (int cc = 0; cc < m; ++cc) acc[i * m + cc] = X(i, cc);
    }
  });
}

Real TransportOperator::artificial_viscosity(const Field& y, int e,
                                             std::span<const Real> Rs) const {
  const ElemCache& c = cache_[e];
  const mesh::ReferenceElement& ref = refs_[c.ref_id];
  const int nb = y.n_nodes(e);
  const int nq = ref.vol_rule.npts();
  const int m = layout_.ncomp();
  const int ns = layout_.n_species;

  // intra-element temperature oscillation sensor at the solution nodes
  Real Tmin = 1e300, Tmax = -1e300, Tsum = 0, hint = 0;
  std::vector<Real> Tj(nb);
  for (int j = 0; j < nb; ++j) {
    Tj[j] = thermo::temperature_from_state_ext(*gm_, y.state(e, j), hint);
    hint = Tj[j];
    Tmin = std::min(Tmin, Tj[j]);
    Tmax = std::max(Tmax, Tj[j]);
    Tsum += Tj[j];
  }
  const Real Tbar = Tsum / nb;
  const Real S_av = std::clamp((Tmax - Tmin) / Tbar - opt_.av_kappa0, 0.0, 1.0);

  Real worst = 0;
  for (int q = 0; q < nq; ++q) {
    MixtureState yq(layout_);
    Real Tq = 0;
    for (int j = 0; j < nb; ++j) {
      const Real ph = c.phi_vol(q, j);
      for (int cc = 0; cc < m; ++cc) yq.u[cc] += ph * y.node_state(e, j)[cc];
      Tq += ph * Tj[j];
    }
    Real rho = 0;
    for (int i = 0; i < ns; ++i) rho += gm_->species[i].W * yq.C(i);
    if (!(rho > 0) || !(Tq > 0)) continue;
    Real cv = 0;
    for (int i = 0; i < ns; ++i)
      if (yq.C(i) != 0) cv += gm_->species[i].W * yq.C(i) * gm_->species[i].cv_ext(Tq);
    cv /= rho;
    Real v2 = 0;
    Real vk[2] = {0, 0};
    for (int k = 0; k < layout_.dim; ++k) {
      vk[k] = yq.rho_v(k) / rho;
      v2 += vk[k] * vk[k];
    }
    // dT/dy . R
    Real contr = 0;
    for (int k = 0; k < layout_.dim; ++k)
      contr += -vk[k] / (rho * cv) * Rs[q * m + layout_.mom(k)];
    contr += 1.0 / (rho * cv) * Rs[q * m + layout_.energy()];
    for (int i = 0; i < ns; ++i) {
      const Real dTdC =
          gm_->species[i].W * (0.5 * v2 - gm_->species[i].u_ext(Tq)) / (rho * cv);
      contr += dTdC * Rs[q * m + layout_.species(i)];
    }
    worst = std::max(worst, std::abs(contr) / Tq);
  }
  return (opt_.c_av + S_av) * c.h * c.h / (p_ + 1) * worst;
}

std::vector<Real> TransportOperator::strong_residual(const Field& y, int e) const {
  const ElemCache& c = cache_[e];
  const mesh::ReferenceElement& ref = refs_[c.ref_id];
  const int nb = y.n_nodes(e);
  const int nq = ref.vol_rule.npts();
  const int m = layout_.ncomp();
  const int d = mesh_->dim;

  std::vector<StateVec> Fj(nb);
  Real hint = 0;
  for (int j = 0; j < nb; ++j) {
    const MixtureState yj = y.state(e, j);
    const Real T = thermo::temperature_from_state_ext(*gm_, yj, hint);
    hint = T;
    Real Csum = 0, rho = 0;
    for (int i = 0; i < layout_.n_species; ++i) {
      Csum += yj.C(i);
      rho += gm_->species[i].W * yj.C(i);
    }
    const Real P = gm_->R0 * T * Csum;
    Fj[j].resize(m * d);
    for (int k = 0; k < d; ++k) {
      Real nvec[2] = {0, 0};
      nvec[k] = 1;
      const StateVec fk = flux_dot_n(yj, rho, P, nvec);
      for (int cc = 0; cc < m; ++cc) Fj[j][k * m + cc] = fk[cc];
    }
  }
  std::vector<Real> Rs(nq * m, 0.0);
  for (int q = 0; q < nq; ++q)
    for (int j = 0; j < nb; ++j)
      for (int k = 0; k < d; ++k) {
        const Real dp = c.dphi_vol[k](q, j);
        for (int cc = 0; cc < m; ++cc) Rs[q * m + cc] += dp * Fj[j][k * m + cc];
      }
  return Rs;
}

std::vector<Real> TransportOperator::element_min_entropy(const Field& y) const {
  const int ne = mesh_->n_elements();
  std::vector<Real> mins(ne);
  parallel_for(ne, opt_.n_threads, [&](int eb, int ee) {
    for (int e = eb; e < ee; ++e) {
      const limiter::PointSet& D = cache_[e].D;
      const int m = layout_.ncomp();
      Real smin = 1e300, hint = 0;
      bool any_valid = false;
      for (int q = 0; q < D.npts(); ++q) {
        MixtureState yq(layout_);
        for (int j = 0; j < D.n_basis(); ++j) {
          const Real ph = D.phi(q, j);
          for (int cc = 0; cc < m; ++cc) yq.u[cc] += ph * y.node_state(e, j)[cc];
        }
        const Real sq = thermo::entropy_from_state_ext(*gm_, yq, hint);
        // inadmissible interpolation artifacts carry no entropy information;
        // the positivity stages repair them and they must not disable the
        // entropy bound
        if (sq > thermo::kEntropySentinel) {
          smin = std::min(smin, sq);
          any_valid = true;
        }
      }
      mins[e] = any_valid ? smin : thermo::kEntropySentinel;
    }
  });
  return mins;
}

Real TransportOperator::element_wave_speed(const Field& y, int e) const {
  Real lam = 0;
  for (int j = 0; j < y.n_nodes(e); ++j)
    lam = std::max(lam, max_wave_speed(*gm_, y.state(e, j)));
  return lam;
}

Real TransportOperator::element_trace_wave_speed(const Field& y, int e) const {
  Real lam = 0;
  for (int fid : mesh_->elem_faces[e]) {
    const mesh::MeshFace& mf = mesh_->faces[fid];
    const FaceCache& fc = fcache_[fid];
    const auto& fg = cache_[mf.elem_in].geom.faces[mf.face_in];
    const int nl = static_cast<int>(fc.in.phi.rows());
    const int d = mesh_->dim;
    for (int l = 0; l < nl; ++l) {
      const Real* n = &fg.normals[l * d];
      for (int side = 0; side < 2; ++side) {
        const int ecur = side == 0 ? mf.elem_in : mf.elem_out;
        if (ecur < 0) continue;
        const FaceSide& fs = side == 0 ? fc.in : fc.out;
        MixtureState yq(layout_);
        for (int j = 0; j < static_cast<int>(fs.phi.cols()); ++j) {
          const Real ph = fs.phi(l, j);
          for (int cc = 0; cc < layout_.ncomp(); ++cc)
            yq.u[cc] += ph * y.node_state(ecur, j)[cc];
        }
        lam = std::max(lam, directional_wave_speed(*gm_, yq, n));
      }
    }
  }
  return lam;
}

Real TransportOperator::theorem1_dt_floor(const Field& y) const {
  Real floor = 1e300;
  for (int e = 0; e < mesh_->n_elements(); ++e) {
    const Real lam = element_trace_wave_speed(y, e);
    if (lam <= 0) continue;
    floor = std::min(floor,
                     decomp::dt_bound_general(cache_[e].ledger, lam, cache_[e].geom.volume));
  }
  return floor;
}

} // namespace rxdg::dg
