#include "rxdg/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rxdg/errors.hpp"
#include "rxdg/flux.hpp"

namespace rxdg::decomp {

Real DecompLedger::theta_sum() const {
  Real s = std::accumulate(theta_v.begin(), theta_v.end(), 0.0);
  for (const auto& row : theta_fl) s = std::accumulate(row.begin(), row.end(), s);
  return s;
}

namespace {

constexpr Real kInf = std::numeric_limits<Real>::infinity();

struct FacePointTable {
  // reference coordinates of every face quadrature point, element face order
  std::vector<std::vector<std::array<Real, 2>>> xi;
  std::vector<int> npts;
  int N = 0;
};

FacePointTable face_points(const mesh::ReferenceElement& ref) {
  FacePointTable t;
  t.xi.resize(ref.n_faces());
  t.npts.resize(ref.n_faces());
  for (int f = 0; f < ref.n_faces(); ++f) {
    const int nl = ref.face_npts(f);
    t.npts[f] = nl;
    t.N = std::max(t.N, nl);
    t.xi[f].resize(nl);
    for (int l = 0; l < nl; ++l) {
      Real xi[2] = {0, 0};
      ref.face_point(f, l, xi);
      t.xi[f][l] = {xi[0], xi[1]};
    }
  }
  return t;
}

/// Distance from a reference point to the element boundary (straight in
/// reference coordinates).
Real boundary_distance(const mesh::ReferenceElement& ref, const Real* xi) {
  Real dmin = kInf;
  for (int f = 0; f < ref.n_faces(); ++f) {
    const auto& fc = ref.faces[f];
    const Real ax = fc.xi_a[0], ay = fc.xi_a[1];
    const Real bx = fc.xi_b[0], by = fc.xi_b[1];
    const Real ex = bx - ax, ey = by - ay;
    const Real len2 = ex * ex + ey * ey;
    Real t = len2 > 0 ? ((xi[0] - ax) * ex + (xi[1] - ay) * ey) / len2 : 0;
    t = std::clamp(t, 0.0, 1.0);
    const Real px = ax + t * ex, py = ay + t * ey;
    const Real d2 = (xi[0] - px) * (xi[0] - px) + (xi[1] - py) * (xi[1] - py);
    dmin = std::min(dmin, std::sqrt(d2));
  }
  return dmin;
}

std::vector<int> monomial_rows(basis::Shape shape, int p,
                               std::vector<std::array<int, 2>>& expo) {
  expo.clear();
  if (shape == basis::Shape::line) {
    for (int a = 0; a <= p; ++a) expo.push_back({a, 0});
  } else if (shape == basis::Shape::triangle) {
    for (int t = 0; t <= p; ++t)
      for (int a = t; a >= 0; --a) expo.push_back({a, t - a});
  } else {
    for (int b = 0; b <= p; ++b)
      for (int a = 0; a <= p; ++a) expo.push_back({a, b});
  }
  std::vector<int> idx(expo.size());
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

Eigen::VectorXd monomial_vec(const std::vector<std::array<int, 2>>& expo,
                             const Real* xi, int dim) {
  Eigen::VectorXd m(static_cast<int>(expo.size()));
  for (size_t j = 0; j < expo.size(); ++j)
    m(j) = std::pow(xi[0], expo[j][0]) *
           (dim > 1 ? std::pow(xi[1], expo[j][1]) : 1.0);
  return m;
}

} // namespace

DecompLedger compute_thetas(const mesh::ElementGeometry& elem, int p) {
  const mesh::ReferenceElement& ref = *elem.ref;
  const int d = ref.dim();
  const int nf = ref.n_faces();
  const int nq = ref.vol_rule.npts();

  DecompLedger led;
  led.volume = elem.volume;
  led.surface = elem.surface();

  FacePointTable fp = face_points(ref);
  led.N = fp.N;

  // internal face order: a face with the maximum point count goes last
  led.face_order.resize(nf);
  std::iota(led.face_order.begin(), led.face_order.end(), 0);
  int argmax = 0;
  for (int f = 0; f < nf; ++f)
    if (fp.npts[f] >= fp.npts[argmax]) argmax = f;
  led.face_order.erase(led.face_order.begin() + argmax);
  led.face_order.push_back(argmax);

  led.nu_fl.assign(nf, std::vector<Real>(led.N, 0.0));
  led.face_area.resize(nf);
  for (int fi = 0; fi < nf; ++fi) {
    const int f = led.face_order[fi];
    led.face_area[fi] = elem.faces[f].area;
    for (int l = 0; l < fp.npts[f]; ++l) led.nu_fl[fi][l] = elem.faces[f].nu[l];
  }

  // subset detection: each face point matches a volume point
  std::vector<std::vector<int>> match(nf);
  bool subset = true;
  for (int f = 0; f < nf && subset; ++f) {
    match[f].assign(fp.npts[f], -1);
    for (int l = 0; l < fp.npts[f]; ++l) {
      for (int v = 0; v < nq; ++v) {
        Real dist = 0;
        for (int k = 0; k < d; ++k)
          dist = std::max(dist, std::abs(ref.vol_rule.pt(v, k) - fp.xi[f][l][k]));
        if (dist < 1e-12) {
          match[f][l] = v;
          break;
        }
      }
      if (match[f][l] < 0) subset = false;
    }
  }

  led.theta_v.assign(nq, 0.0);
  led.theta_fl.assign(nf, std::vector<Real>(led.N, 0.0));

  if (subset && d > 1) {
    // direct weight reassignment; corner points shared by two faces split
    // their volume weight evenly
    std::vector<int> share(nq, 0);
    for (int f = 0; f < nf; ++f)
      for (int l = 0; l < fp.npts[f]; ++l) ++share[match[f][l]];
    for (int v = 0; v < nq; ++v)
      if (share[v] == 0)
        led.theta_v[v] = elem.jac_det[v] * ref.vol_rule.weights[v] / elem.volume;
    for (int fi = 0; fi < nf; ++fi) {
      const int f = led.face_order[fi];
      for (int l = 0; l < fp.npts[f]; ++l) {
        const int v = match[f][l];
        led.theta_fl[fi][l] =
            elem.jac_det[v] * ref.vol_rule.weights[v] / elem.volume / share[v];
      }
    }
  } else {
    // general case: theta_fl = t nu / |dk| with a Lagrange correction of the
    // volume weights through a degree-p basis on a subset of volume points
    const int nb = basis::space_dim(ref.shape, p);
    if (nq < nb)
      throw NoPositiveTheta("compute_thetas: volume rule has fewer points than the basis");

    // candidate order: volume points nearest the boundary first
    std::vector<int> order(nq);
    std::iota(order.begin(), order.end(), 0);
    std::vector<Real> dist(nq);
    for (int v = 0; v < nq; ++v) {
      Real xi[2] = {0, 0};
      for (int k = 0; k < d; ++k) xi[k] = ref.vol_rule.pt(v, k);
      dist[v] = boundary_distance(ref, xi);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return dist[a] < dist[b]; });

    // greedy unisolvent selection (modified Gram-Schmidt on monomial rows)
    std::vector<std::array<int, 2>> expo;
    monomial_rows(ref.shape, p, expo);
    std::vector<Eigen::VectorXd> ortho;
    std::vector<int> selected;
    for (int v : order) {
      if (static_cast<int>(selected.size()) == nb) break;
      Real xi[2] = {0, 0};
      for (int k = 0; k < d; ++k) xi[k] = ref.vol_rule.pt(v, k);
      Eigen::VectorXd r = monomial_vec(expo, xi, d);
      const Real norm0 = r.norm();
      for (const auto& q : ortho) r -= q.dot(r) * q;
      if (r.norm() > 1e-7 * std::max(norm0, 1.0)) {
        ortho.push_back(r.normalized());
        selected.push_back(v);
      }
    }
    if (static_cast<int>(selected.size()) < nb)
      throw NoPositiveTheta("compute_thetas: could not select a unisolvent point subset");

    std::vector<Real> sel_nodes;
    for (int v : selected)
      for (int k = 0; k < d; ++k) sel_nodes.push_back(ref.vol_rule.pt(v, k));
    const basis::NodalBasis psi =
        basis::NodalBasis::on_nodes(ref.shape, p, std::move(sel_nodes));

    // a_v and b_v with theta_v(t) = a_v - t b_v
    std::vector<Real> a(nq), b(nq, 0.0);
    for (int v = 0; v < nq; ++v)
      a[v] = elem.jac_det[v] * ref.vol_rule.weights[v] / elem.volume;
    std::vector<Real> psi_vals(nb);
    for (int fi = 0; fi < nf; ++fi) {
      const int f = led.face_order[fi];
      for (int l = 0; l < fp.npts[f]; ++l) {
        Real xi[2] = {fp.xi[f][l][0], fp.xi[f][l][1]};
        psi.eval(xi, psi_vals.data());
        const Real w = led.nu_fl[fi][l] / led.surface;
        for (int s = 0; s < nb; ++s) b[selected[s]] += w * psi_vals[s];
      }
    }

    Real t_max = 1.0;
    for (int v = 0; v < nq; ++v)
      if (b[v] > 0) t_max = std::min(t_max, a[v] / b[v]);
    if (!(t_max > 1e-12))
      throw NoPositiveTheta("compute_thetas: no positive theta_fl admissible");

    // The constraint scales grow linearly in t, so the golden-section search
    // on min(L_A, L_B, L_C) lands on the feasibility boundary t_max.
    auto scales_at = [&](Real t) {
      for (int v = 0; v < nq; ++v) led.theta_v[v] = a[v] - t * b[v];
      for (int fi = 0; fi < nf; ++fi)
        for (int l = 0; l < led.N; ++l)
          led.theta_fl[fi][l] = t * led.nu_fl[fi][l] / led.surface;
    };
    auto objective = [&](Real t) {
      for (int v = 0; v < nq; ++v)
        if (a[v] - t * b[v] < -1e-14) return -kInf;
      Real LA = kInf, LB = kInf, LC;
      for (int fi = 0; fi < nf - 1; ++fi)
        for (int l = 0; l < led.N; ++l)
          if (led.nu_fl[fi][l] > 0) LA = std::min(LA, t / led.surface);
      for (int fi = 0; fi < nf; ++fi)
        for (int l = 0; l < std::min(fp.npts[led.face_order[fi]], led.N - 1); ++l)
          if (led.nu_fl[fi][l] > 0)
            LB = std::min(LB, t * led.nu_fl[nf - 1][l] / led.surface / led.nu_fl[fi][l] *
                                  led.face_area[fi] / led.surface);
      LC = t * led.nu_fl[nf - 1][led.N - 1] / (led.surface * led.surface);
      return std::min({LA, LB, LC});
    };
    Real lo = 1e-9, hi = t_max;
    const Real gr = (std::sqrt(5.0) - 1) / 2;
    Real x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    Real f1 = objective(x1), f2 = objective(x2);
    for (int it = 0; it < 200; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = objective(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = objective(x1);
      }
    }
    const Real t = std::min(0.5 * (lo + hi), t_max);
    scales_at(t);
    for (Real& tv : led.theta_v)
      if (tv < 0) tv = 0;  // clamp roundoff at the feasibility boundary
  }

  // Theorem-1 constraint scales from the final coefficients
  led.L_A = kInf;
  for (int fi = 0; fi < nf - 1; ++fi)
    for (int l = 0; l < led.N; ++l)
      if (led.nu_fl[fi][l] > 0)
        led.L_A = std::min(led.L_A, led.theta_fl[fi][l] / led.nu_fl[fi][l]);
  led.L_B = kInf;
  for (int fi = 0; fi < nf; ++fi)
    for (int l = 0; l < led.N - 1; ++l)
      if (led.nu_fl[fi][l] > 0)
        led.L_B = std::min(led.L_B, led.theta_fl[nf - 1][l] / led.nu_fl[fi][l] *
                                        led.face_area[fi] / led.surface);
  led.L_C = led.theta_fl[nf - 1][led.N - 1] / led.surface;
  return led;
}

Real dt_bound_general(const DecompLedger& ledger, Real lambda_max, Real volume) {
  const Real Lmin = std::min({ledger.L_A, ledger.L_B, ledger.L_C});
  return volume * Lmin / (2 * lambda_max);
}

Real dt_bound_straight(const mesh::ElementGeometry& elem,
                       std::span<const Real> w_hat, const DecompLedger& ledger,
                       Real lambda_max) {
  const mesh::ReferenceElement& ref = *elem.ref;
  const int d = ref.dim();
  const int nf = ref.n_faces();
  // straight-sidedness: constant normal and surface Jacobian per face
  for (int f = 0; f < nf; ++f) {
    const auto& fg = elem.faces[f];
    const int nl = ref.face_npts(f);
    if (nl != static_cast<int>(w_hat.size()))
      throw NotStraightSided("dt_bound_straight: identical per-face rules required");
    for (int l = 1; l < nl; ++l) {
      Real dn = 0;
      for (int k = 0; k < d; ++k)
        dn = std::max(dn, std::abs(fg.normals[l * d + k] - fg.normals[k]));
      const Real j0 = fg.nu[0] / ref.face_rules[f].weights[0];
      const Real jl = fg.nu[l] / ref.face_rules[f].weights[l];
      if (dn > 1e-12 || std::abs(jl - j0) > 1e-12 * std::abs(j0))
        throw NotStraightSided("dt_bound_straight: face has varying normal or Jacobian");
    }
  }
  const int nl = static_cast<int>(w_hat.size());
  Real LA = kInf, LB = kInf;
  for (int fi = 0; fi < nf - 1; ++fi)
    for (int l = 0; l < nl; ++l)
      LA = std::min(LA, ledger.theta_fl[fi][l] / (ledger.face_area[fi] * w_hat[l]));
  for (int l = 0; l < nl; ++l)
    LB = std::min(LB, ledger.theta_fl[nf - 1][l] / (ledger.surface * w_hat[l]));
  return elem.volume * std::min(LA, LB) / (2 * lambda_max);
}

namespace {

StateVec axpy(const StateVec& y, Real a, const StateVec& x) {
  StateVec r = y;
  for (int c = 0; c < r.size(); ++c) r[c] += a * x[c];
  return r;
}

} // namespace

OraclePair decomposition_oracle(const thermo::GasModel& gm, const dg::Field& f,
                                int e, const mesh::ElementGeometry& g,
                                const DecompLedger& led,
                                const ExteriorTraces& exterior, Real dt) {
  const mesh::ReferenceElement& ref = *g.ref;
  const int nf = ref.n_faces();
  const int d = ref.dim();
  const int m = f.layout().ncomp();
  const int nq = ref.vol_rule.npts();
  const auto& b = f.elem_basis(e);

  // interior traces, volume values, and the element average (internal order)
  std::vector<std::vector<MixtureState>> y_in(nf), y_out(nf);
  std::vector<std::vector<std::array<Real, 2>>> nrm(nf);
  std::vector<std::vector<Real>> nu(nf);
  for (int fi = 0; fi < nf; ++fi) {
    const int fe = led.face_order[fi];
    const int nl = ref.face_npts(fe);
    y_in[fi].resize(nl);
    y_out[fi].resize(nl);
    nrm[fi].resize(nl);
    nu[fi] = led.nu_fl[fi];
    for (int l = 0; l < nl; ++l) {
      Real xi[2] = {0, 0};
      ref.face_point(fe, l, xi);
      y_in[fi][l] = dg::interpolate(f, e, xi);
      y_out[fi][l] = exterior[fe][l];
      for (int k = 0; k < d; ++k) nrm[fi][l][k] = g.faces[fe].normals[l * d + k];
    }
  }
  std::vector<MixtureState> y_vol(nq);
  StateVec ybar(m, 0.0);
  for (int q = 0; q < nq; ++q) {
    Real xi[2] = {0, 0};
    for (int k = 0; k < d; ++k) xi[k] = ref.vol_rule.pt(q, k);
    y_vol[q] = dg::interpolate(f, e, xi);
    const Real w = g.jac_det[q] * ref.vol_rule.weights[q] / g.volume;
    for (int c = 0; c < m; ++c) ybar[c] += w * y_vol[q].u[c];
  }

  auto hllc = [&](const MixtureState& a, const MixtureState& bb,
                  const std::array<Real, 2>& n, bool flipn) {
    Real nn[2] = {flipn ? -n[0] : n[0], flipn ? -n[1] : n[1]};
    return dg::hllc_flux(gm, a, bb, nn);
  };

  // direct forward-Euler average update
  StateVec direct = ybar;
  for (int fi = 0; fi < nf; ++fi)
    for (size_t l = 0; l < y_in[fi].size(); ++l) {
      const StateVec F = hllc(y_in[fi][l], y_out[fi][l], nrm[fi][l], false);
      direct = axpy(direct, -dt * nu[fi][l] / g.volume, F);
    }

  // reconstruction: pointwise values + A, B, C terms
  const int last = nf - 1;
  const int N = led.N;
  StateVec recon(m, 0.0);
  for (int q = 0; q < nq; ++q)
    recon = axpy(recon, led.theta_v[q], y_vol[q].u);

  // A terms: faces before the last, paired with point l of the last face
  for (int fi = 0; fi < last; ++fi)
    for (size_t l = 0; l < y_in[fi].size(); ++l) {
      const Real th = led.theta_fl[fi][l];
      if (th == 0) continue;
      const StateVec F1 = hllc(y_in[fi][l], y_out[fi][l], nrm[fi][l], false);
      const StateVec F2 = hllc(y_in[fi][l], y_in[last][l], nrm[fi][l], true);
      StateVec A = y_in[fi][l].u;
      const Real coef = dt * nu[fi][l] / (th * g.volume);
      for (int c = 0; c < m; ++c) A[c] -= coef * (F1[c] + F2[c]);
      recon = axpy(recon, th, A);
    }

  // B terms: last face, points l < N-1, convex form
  for (int l = 0; l < N - 1; ++l) {
    const Real th = led.theta_fl[last][l];
    if (th == 0) continue;
    StateVec B(m, 0.0);
    {
      const Real pref = led.face_area[last] / led.surface;
      const StateVec F1 = hllc(y_in[last][l], y_out[last][l], nrm[last][l], false);
      const StateVec F2 = hllc(y_in[last][l], y_in[last][N - 1], nrm[last][l], true);
      StateVec piece = y_in[last][l].u;
      const Real coef = dt * nu[last][l] * led.surface /
                        (th * g.volume * led.face_area[last]);
      for (int c = 0; c < m; ++c) piece[c] -= coef * (F1[c] + F2[c]);
      B = axpy(B, pref, piece);
    }
    for (int fi = 0; fi < last; ++fi) {
      const Real pref = led.face_area[fi] / led.surface;
      StateVec piece = y_in[last][l].u;
      if (nu[fi][l] > 0) {
        const StateVec F1 = hllc(y_in[last][l], y_in[fi][l], nrm[fi][l], false);
        const StateVec F2 = hllc(y_in[last][l], y_in[last][N - 1], nrm[fi][l], true);
        const Real coef =
            dt * nu[fi][l] * led.surface / (th * g.volume * led.face_area[fi]);
        for (int c = 0; c < m; ++c) piece[c] -= coef * (F1[c] + F2[c]);
      }
      B = axpy(B, pref, piece);
    }
    recon = axpy(recon, th, B);
  }

  // C term: point N-1 of the last face, convex form over all nu weights
  {
    const Real th = led.theta_fl[last][N - 1];
    const MixtureState& z = y_in[last][N - 1];
    StateVec C(m, 0.0);
    const Real coef = dt * led.surface / (th * g.volume);
    {
      const Real pref = nu[last][N - 1] / led.surface;
      const StateVec F1 = hllc(z, y_out[last][N - 1], nrm[last][N - 1], false);
      const StateVec F2 = hllc(z, z, nrm[last][N - 1], true);
      StateVec piece = z.u;
      for (int c = 0; c < m; ++c) piece[c] -= coef * (F1[c] + F2[c]);
      C = axpy(C, pref, piece);
    }
    for (int l = 0; l < N - 1; ++l) {
      const Real pref = nu[last][l] / led.surface;
      if (pref == 0) continue;
      const StateVec F1 = hllc(z, y_in[last][l], nrm[last][l], false);
      const StateVec F2 = hllc(z, z, nrm[last][l], true);
      StateVec piece = z.u;
      for (int c = 0; c < m; ++c) piece[c] -= coef * (F1[c] + F2[c]);
      C = axpy(C, pref, piece);
    }
    for (int fi = 0; fi < last; ++fi) {
      if (static_cast<int>(y_in[fi].size()) >= N) {
        const Real pref = nu[fi][N - 1] / led.surface;
        if (pref > 0) {
          const StateVec F1 = hllc(z, y_in[fi][N - 1], nrm[fi][N - 1], false);
          const StateVec F2 = hllc(z, z, nrm[fi][N - 1], true);
          StateVec piece = z.u;
          for (int c = 0; c < m; ++c) piece[c] -= coef * (F1[c] + F2[c]);
          C = axpy(C, pref, piece);
        }
      }
      for (int l = 0; l < N - 1; ++l) {
        const Real pref = nu[fi][l] / led.surface;
        if (pref == 0) continue;
        const StateVec F1 = hllc(z, y_in[last][l], nrm[fi][l], false);
        const StateVec F2 = hllc(z, z, nrm[fi][l], true);
        StateVec piece = z.u;
        for (int c = 0; c < m; ++c) piece[c] -= coef * (F1[c] + F2[c]);
        C = axpy(C, pref, piece);
      }
    }
    recon = axpy(recon, th, C);
  }

  return {direct, recon};
}

Real alpha_star(const thermo::GasModel& gm, const MixtureState& y,
                const StateVec& dF) {
  const StateLayout lay = y.layout;
  for (int i = 0; i < lay.n_species; ++i)
    if (dF[lay.species(i)] != 0)
      throw InadmissibleInput("alpha_star: concentration rows of dF must vanish");
  const auto sq = thermo::shifted_quantities(gm, y);
  if (!(sq.Z > 0)) throw InadmissibleInput("alpha_star: state not in G (Z <= 0)");

  Real rho = 0;
  for (int i = 0; i < lay.n_species; ++i) rho += gm.species[i].W * y.C(i);
  Real v_dot_dF = 0, dF2 = 0;
  for (int k = 0; k < lay.dim; ++k) {
    v_dot_dF += y.rho_v(k) * dF[lay.mom(k)];
    dF2 += dF[lay.mom(k)] * dF[lay.mom(k)];
  }
  const Real b = -rho * dF[lay.energy()] + v_dot_dF;
  const Real g = -0.5 * dF2;
  const Real disc = b * b - 4 * sq.Z * g;
  const Real alpha_T = disc >= 0 ? (-b + std::sqrt(disc)) / (2 * sq.Z) : 0.0;
  return std::max(alpha_T, 0.0);
}

void quad_to_tri(const Real* eta, Real* xi) {
  xi[0] = 0.5 * (1 + eta[0]) * (1 - eta[1]) - 1;
  xi[1] = eta[1];
}

void tri_to_quad(const Real* xi, Real* eta) {
  eta[0] = 2 * (1 + xi[0]) / (1 - xi[1]) - 1;
  eta[1] = xi[1];
}

namespace {

/// Paper node ordering of the nine-node Gauss-Lobatto quadrilateral:
/// corners, edge midpoints, center.
const std::vector<Real>& quad9_nodes() {
  static const std::vector<Real> nodes = {-1, -1, 1, -1, 1, 1, -1, 1,
                                          0,  -1, 1, 0,  0, 1, -1, 0,
                                          0,  0};
  return nodes;
}

} // namespace

std::vector<std::array<Real, 2>> tri7_nodes() {
  // degeneration of the nine-node quadrilateral under the collapse map
  return {{-1, -1}, {1, -1}, {-1, 1}, {0, -1}, {0, 0}, {-1, 0}, {-0.5, 0}};
}

std::vector<MixtureState> aux_poly_quad(const mesh::ElementGeometry& g,
                                        std::span<const MixtureState> ytilde_bnd8,
                                        const MixtureState& ybar) {
  if (g.ref->shape != basis::Shape::quadrilateral)
    throw UnsupportedShape("aux_poly_quad: quadrilateral element required");
  const basis::NodalBasis phi =
      basis::NodalBasis::on_nodes(basis::Shape::quadrilateral, 2, quad9_nodes());
  const auto& rule = g.ref->vol_rule;
  const int m = ybar.layout.ncomp();

  Real denom = 0;
  StateVec acc(m, 0.0);
  std::vector<Real> ph(9);
  for (int q = 0; q < rule.npts(); ++q) {
    Real xi[2] = {rule.pt(q, 0), rule.pt(q, 1)};
    phi.eval(xi, ph.data());
    const Real jw = g.jac_det[q] * rule.weights[q];
    denom += jw * ph[8];
    for (int k = 0; k < 8; ++k)
      for (int c = 0; c < m; ++c) acc[c] += jw * ph[k] * ytilde_bnd8[k].u[c];
  }
  if (std::abs(denom) < 1e-12 * g.volume)
    throw DegenerateDenominator("aux_poly_quad: vanishing center-mode integral");

  std::vector<MixtureState> out(ytilde_bnd8.begin(), ytilde_bnd8.end());
  MixtureState center(ybar.layout);
  for (int c = 0; c < m; ++c) center.u[c] = (ybar.u[c] * g.volume - acc[c]) / denom;
  out.push_back(center);
  return out;
}

std::vector<MixtureState> aux_poly_tri(const mesh::ElementGeometry& g,
                                       std::span<const MixtureState> ytilde_bnd6,
                                       const MixtureState& ybar) {
  if (g.ref->shape != basis::Shape::triangle)
    throw UnsupportedShape("aux_poly_tri: triangular element required");
  const basis::NodalBasis phi =
      basis::NodalBasis::on_nodes(basis::Shape::quadrilateral, 2, quad9_nodes());
  const basis::NodalBasis gb =
      basis::NodalBasis::geometry(basis::Shape::triangle, g.ref->geom_degree);
  const quad::QuadratureRule rule = quad::quad_rule(8);
  const int m = ybar.layout.ncomp();

  // collapsed basis: indices into the quad basis; node 2 of the triangle
  // absorbs quad nodes 2, 3, 6
  auto phi_tri = [&](const Real* eta, Real* out7) {
    std::vector<Real> ph(9);
    phi.eval(eta, ph.data());
    out7[0] = ph[0];
    out7[1] = ph[1];
    out7[2] = ph[2] + ph[3] + ph[6];
    out7[3] = ph[4];
    out7[4] = ph[5];
    out7[5] = ph[7];
    out7[6] = ph[8];
  };

  Real denom = 0, vol = 0;
  StateVec acc(m, 0.0);
  Real ph7[7];
  for (int q = 0; q < rule.npts(); ++q) {
    const Real eta[2] = {rule.pt(q, 0), rule.pt(q, 1)};
    Real xi_b[2];
    quad_to_tri(eta, xi_b);
    // bi-unit triangle -> our unit reference triangle
    const Real xi_u[2] = {0.5 * (xi_b[0] + 1), 0.5 * (xi_b[1] + 1)};
    Real x[2], det;
    g.map_point(gb, xi_u, x, nullptr, &det);
    const Real collapse = 0.5 * (1 - eta[1]);
    const Real jw = det * 0.25 * collapse * rule.weights[q];
    phi_tri(eta, ph7);
    vol += jw;
    denom += jw * ph7[6];
    for (int k = 0; k < 6; ++k)
      for (int c = 0; c < m; ++c) acc[c] += jw * ph7[k] * ytilde_bnd6[k].u[c];
  }
  if (std::abs(denom) < 1e-12 * vol)
    throw DegenerateDenominator("aux_poly_tri: vanishing interior-mode integral");

  std::vector<MixtureState> out(ytilde_bnd6.begin(), ytilde_bnd6.end());
  MixtureState node7(ybar.layout);
  for (int c = 0; c < m; ++c) node7.u[c] = (ybar.u[c] * vol - acc[c]) / denom;
  out.push_back(node7);
  return out;
}

namespace {

std::vector<int> quad_face_node_indices(int p, int face) {
  // tensor solution nodes, row-major (i fastest); CCW traversal per face
  std::vector<int> idx;
  auto id = [p](int i, int j) { return j * (p + 1) + i; };
  switch (face) {
    case 0: for (int i = 0; i <= p; ++i) idx.push_back(id(i, 0)); break;
    case 1: for (int j = 0; j <= p; ++j) idx.push_back(id(p, j)); break;
    case 2: for (int i = p; i >= 0; --i) idx.push_back(id(i, p)); break;
    default: for (int j = p; j >= 0; --j) idx.push_back(id(0, j)); break;
  }
  return idx;
}

} // namespace

FallbackResult modified_flux_fallback(const thermo::GasModel& gm,
                                      const dg::Field& f, int e,
                                      const mesh::ElementGeometry& g,
                                      const ExteriorTraces& exterior_at_quad,
                                      const ExteriorTraces& exterior_at_nodes,
                                      Real dt,
                                      const thermo::AdmissibleParams& params) {
  const mesh::ReferenceElement& ref = *g.ref;
  if (ref.shape != basis::Shape::quadrilateral)
    throw UnsupportedShape("modified_flux_fallback: Gauss-Lobatto quadrilateral layout required");
  const int d = 2;
  const int p = f.degree();
  const int m = f.layout().ncomp();
  const int nq = ref.vol_rule.npts();

  StateVec ybar(m, 0.0);
  for (int q = 0; q < nq; ++q) {
    Real xi[2] = {ref.vol_rule.pt(q, 0), ref.vol_rule.pt(q, 1)};
    const MixtureState y = dg::interpolate(f, e, xi);
    const Real w = g.jac_det[q] * ref.vol_rule.weights[q] / g.volume;
    for (int c = 0; c < m; ++c) ybar[c] += w * y.u[c];
  }

  // branch 1: modified-state surface integral at the face quadrature points;
  // a nonphysical modified trace counts as a rejection of this branch
  FallbackResult res;
  res.accepted = false;
  StateVec avg1 = ybar;
  bool branch1_evaluated = true;
  try {
    for (int fc = 0; fc < ref.n_faces(); ++fc) {
      for (int l = 0; l < ref.face_npts(fc); ++l) {
        Real xi[2];
        ref.face_point(fc, l, xi);
        const MixtureState yt = dg::modified_state(gm, f, e, xi);
        const Real* n = &g.faces[fc].normals[l * d];
        const StateVec F = dg::hllc_flux(gm, yt, exterior_at_quad[fc][l], n);
        const Real coef = dt * g.faces[fc].nu[l] / g.volume;
        for (int c = 0; c < m; ++c) avg1[c] -= coef * F[c];
      }
    }
  } catch (const Error&) {
    branch1_evaluated = false;
  }
  if (branch1_evaluated) {
    const MixtureState avg1_state(f.layout(), avg1);
    const limiter::InGResult r1 = limiter::in_G(gm, avg1_state, params);
    if (r1.admissible) return {true, false, avg1_state};
    res.soft_candidate = r1.violated == limiter::Constraint::entropy;
  }

  // branch 2: node-coincident surface integration (y = ytilde at nodes)
  const basis::NodalBasis gb =
      basis::NodalBasis::geometry(ref.shape, ref.geom_degree);
  const quad::QuadratureRule lob = quad::gauss_lobatto(p + 1);
  StateVec avg2 = ybar;
  for (int fc = 0; fc < ref.n_faces(); ++fc) {
    const auto nodes = quad_face_node_indices(p, fc);
    for (int l = 0; l <= p; ++l) {
      const Real zeta = lob.points[l];
      Real xi[2];
      ref.face_to_ref(fc, zeta, xi);
      Real x[2], J[4], det;
      g.map_point(gb, xi, x, J, &det);
      const auto& rf = ref.faces[fc];
      const Real dxi[2] = {0.5 * (rf.xi_b[0] - rf.xi_a[0]),
                           0.5 * (rf.xi_b[1] - rf.xi_a[1])};
      const Real tx = J[0] * dxi[0] + J[1] * dxi[1];
      const Real ty = J[2] * dxi[0] + J[3] * dxi[1];
      const Real jn = std::sqrt(tx * tx + ty * ty);
      const Real n[2] = {ty / jn, -tx / jn};
      const Real nu = jn * lob.weights[l];
      const MixtureState yn = f.state(e, nodes[l]);
      const StateVec F = dg::hllc_flux(gm, yn, exterior_at_nodes[fc][l], n);
      const Real coef = dt * nu / g.volume;
      for (int c = 0; c < m; ++c) avg2[c] -= coef * F[c];
    }
  }
  res.avg = MixtureState(f.layout(), avg2);
  return res;
}

} // namespace rxdg::decomp
