#include <doctest.h>

#include <cmath>
#include <random>

#include "rxdg/config.hpp"
#include "rxdg/field.hpp"
#include "rxdg/flux.hpp"
#include "rxdg/mesh_gen.hpp"

using namespace rxdg;
using basis::Shape;

namespace {

thermo::GasModel perfect_gas(Real W = 28.97, Real cv = 717.5) {
  thermo::GasModel gm;
  thermo::SpeciesThermo sp;
  sp.name = "G";
  sp.W = W;
  sp.ranges = {{50, 9000, {0.0, cv}, 0.0, 180.0}};
  sp.u0 = 0.0;
  gm.species = {sp};
  gm.validate();
  return gm;
}

thermo::GasModel real_gas() {
  static thermo::GasModel gm =
      cli::load_mechanism(std::string(RXDG_SOURCE_DIR) + "/mech/h2o2_ar_9sp.mech").gas;
  return gm;
}

MixtureState make_state(const thermo::GasModel& gm, StateLayout lay,
                        const std::vector<Real>& X, Real T, Real P,
                        const std::vector<Real>& v) {
  Real Xsum = 0;
  for (Real x : X) Xsum += x;
  const Real Csum = P / (gm.R0 * T);
  std::vector<Real> C(X.size());
  for (size_t i = 0; i < X.size(); ++i) C[i] = X[i] / Xsum * Csum;
  return thermo::state_from_primitive(gm, lay, C, v, T);
}

/// Exact Riemann solver for a calorically perfect gas (two-wave Newton).
struct ExactRiemann {
  Real gamma;
  Real rhoL, uL, pL, rhoR, uR, pR;
  Real p_star = 0, u_star = 0;

  void solve() {
    const Real aL = std::sqrt(gamma * pL / rhoL), aR = std::sqrt(gamma * pR / rhoR);
    auto f = [&](Real p, Real pk, Real rhok, Real ak) {
      if (p > pk) {
        const Real A = 2.0 / ((gamma + 1) * rhok);
        const Real B = (gamma - 1) / (gamma + 1) * pk;
        return (p - pk) * std::sqrt(A / (p + B));
      }
      return 2 * ak / (gamma - 1) *
             (std::pow(p / pk, (gamma - 1) / (2 * gamma)) - 1);
    };
    Real p = std::max(1e-8, 0.5 * (pL + pR));
    for (int it = 0; it < 200; ++it) {
      const Real g = f(p, pL, rhoL, aL) + f(p, pR, rhoR, aR) + (uR - uL);
      const Real dp = std::max(1e-8 * p, 1e-12);
      const Real gp = (f(p + dp, pL, rhoL, aL) + f(p + dp, pR, rhoR, aR) + (uR - uL) - g) / dp;
      const Real pn = p - g / gp;
      if (std::abs(pn - p) < 1e-14 * p) { p = std::max(pn, 1e-12); break; }
      p = std::max(pn, 1e-12);
    }
    p_star = p;
    u_star = 0.5 * (uL + uR) + 0.5 * (f(p, pR, rhoR, aR) - f(p, pL, rhoL, aL));
  }
};

} // namespace

TEST_CASE("interpolation basics") {
  auto gm = real_gas();
  mesh::RectOptions opt;
  opt.nx = 2;
  opt.ny = 2;
  const mesh::Mesh msh = mesh::generate_tri_rect(opt);
  StateLayout lay{2, gm.n_species()};
  dg::Field f(&msh, lay, 2);

  std::vector<Real> X(gm.n_species(), 0.1);
  const MixtureState base = make_state(gm, lay, X, 700.0, 1e5, {10.0, 5.0});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<Real> pert(-0.1, 0.1);
  for (int e = 0; e < msh.n_elements(); ++e)
    for (int j = 0; j < f.n_nodes(e); ++j) {
      MixtureState y = base;
      for (int c = 0; c < lay.ncomp(); ++c) y.u[c] *= 1 + pert(rng);
      f.set_state(e, j, y);
    }

  SUBCASE("nodal evaluation returns stored values bit for bit") {
    const auto& b = f.elem_basis(0);
    for (int j = 0; j < b.n_basis(); ++j) {
      Real xi[2] = {b.node(j, 0), b.node(j, 1)};
      // via modified_state (snaps at nodes)
      const MixtureState y = dg::modified_state(gm, f, 0, xi);
      for (int c = 0; c < lay.ncomp(); ++c)
        CHECK(y.u[c] == f.state(0, j).u[c]);  // bitwise
    }
  }

  SUBCASE("constant field stays constant anywhere") {
    dg::Field g2(&msh, lay, 2);
    for (int e = 0; e < msh.n_elements(); ++e)
      for (int j = 0; j < g2.n_nodes(e); ++j) g2.set_state(e, j, base);
    const Real xi[2] = {0.21, 0.37};
    const MixtureState y = dg::interpolate(g2, 0, xi);
    for (int c = 0; c < lay.ncomp(); ++c)
      CHECK(y.u[c] == doctest::Approx(base.u[c]).epsilon(1e-14));
  }

  SUBCASE("pressure polynomial interpolates nodal pressures") {
    const auto Pj = dg::pressure_poly(gm, f, 0);
    for (int j = 0; j < f.n_nodes(0); ++j) {
      const thermo::StateProps pr = thermo::evaluate(gm, f.state(0, j));
      CHECK(Pj[j] == doctest::Approx(pr.P).epsilon(1e-12));
    }
  }
}

TEST_CASE("pressure equilibrium of the modified state across an interface") {
  // two elements, continuous T and P, discontinuous composition
  auto gm = real_gas();
  const mesh::Mesh msh = mesh::generate_line_mesh(0, 2, 2);
  StateLayout lay{1, gm.n_species()};
  dg::Field f(&msh, lay, 2);

  const Real T0 = 900.0, P0 = 2e5, v0 = 80.0;
  std::vector<Real> XA(gm.n_species(), 0.0), XB(gm.n_species(), 0.0);
  XA[gm.index("AR")] = 1.0;
  XB[gm.index("H2")] = 2.0;
  XB[gm.index("O2")] = 1.0;
  // element 0: pure argon; element 1: H2/O2 mix with a linear blend inside
  for (int e = 0; e < 2; ++e)
    for (int j = 0; j < f.n_nodes(e); ++j) {
      const Real frac = e == 0 ? 0.0 : f.elem_basis(e).node(j, 0) * 0.5 + 0.5;
      std::vector<Real> X(gm.n_species());
      for (int i = 0; i < gm.n_species(); ++i)
        X[i] = (1 - frac) * XA[i] + frac * XB[i];
      f.set_state(e, j, make_state(gm, lay, X, T0, P0, {v0}));
    }

  // traces at the shared interface (xi = +1 of elem 0, xi = -1 of elem 1)
  const Real xiL[1] = {1.0}, xiR[1] = {-1.0};
  const MixtureState yL = dg::modified_state(gm, f, 0, xiL);
  const MixtureState yR = dg::modified_state(gm, f, 1, xiR);
  const Real PL = thermo::evaluate(gm, yL).P;
  const Real PR = thermo::evaluate(gm, yR).P;
  CHECK(PL == doctest::Approx(P0).epsilon(1e-12));
  CHECK(PR == doctest::Approx(P0).epsilon(1e-12));

  SUBCASE("off-node rebuild keeps concentrations and momentum") {
    const Real xi[1] = {0.37};
    const MixtureState yi = dg::interpolate(f, 1, xi);
    const MixtureState ym = dg::modified_state(gm, f, 1, xi);
    for (int i = 0; i < lay.n_species; ++i) CHECK(ym.C(i) == yi.C(i));
    CHECK(ym.rho_v(0) == yi.rho_v(0));
    const Real Pm = thermo::evaluate(gm, ym).P;
    CHECK(Pm == doctest::Approx(P0).epsilon(1e-11));
  }
}

TEST_CASE("HLLC consistency and conservation") {
  auto gm = real_gas();
  StateLayout lay{2, gm.n_species()};
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<Real> uT(300, 3000), uP(1e4, 8e5), uv(-900, 900),
      ux(0.01, 1.0), uang(0, 2 * M_PI);
  for (int t = 0; t < 200; ++t) {
    std::vector<Real> XL(gm.n_species()), XR(gm.n_species());
    for (auto& x : XL) x = ux(rng);
    for (auto& x : XR) x = ux(rng);
    const MixtureState yL = make_state(gm, lay, XL, uT(rng), uP(rng), {uv(rng), uv(rng)});
    const MixtureState yR = make_state(gm, lay, XR, uT(rng), uP(rng), {uv(rng), uv(rng)});
    const Real a = uang(rng);
    const Real n[2] = {std::cos(a), std::sin(a)};
    const Real nm[2] = {-n[0], -n[1]};

    // consistency
    const StateVec fy = dg::hllc_flux(gm, yL, yL, n);
    const thermo::StateProps pr = thermo::evaluate(gm, yL);
    const StateVec fd = dg::flux_dot_n(yL, pr.rho, pr.P, n);
    Real scale = 0;
    for (int c = 0; c < lay.ncomp(); ++c) scale = std::max(scale, std::abs(fd[c]));
    for (int c = 0; c < lay.ncomp(); ++c)
      CHECK(std::abs(fy[c] - fd[c]) <= 1e-14 * scale);

    // conservation (mirror) property
    const StateVec f1 = dg::hllc_flux(gm, yL, yR, n);
    const StateVec f2 = dg::hllc_flux(gm, yR, yL, nm);
    scale = 0;
    for (int c = 0; c < lay.ncomp(); ++c)
      scale = std::max({scale, std::abs(f1[c]), std::abs(f2[c])});
    for (int c = 0; c < lay.ncomp(); ++c)
      CHECK(std::abs(f1[c] + f2[c]) <= 1e-13 * scale);
  }
}

TEST_CASE("HLLC against the exact Riemann solver") {
  // calorically perfect monocomponent gas, gamma = 1.4
  auto gm = perfect_gas(28.97, 717.5);
  const Real Rs = 8314.4621 / 28.97;
  const Real gamma = (717.5 + Rs) / 717.5;
  StateLayout lay{1, 1};

  auto prim_state = [&](Real rho, Real u, Real p) {
    const Real T = p / (rho * Rs);
    std::vector<Real> C{rho / 28.97};
    std::vector<Real> v{u};
    return thermo::state_from_primitive(gm, lay, C, v, T);
  };

  SUBCASE("single contact is resolved exactly") {
    const Real P0 = 1.0e5, v0 = 30.0;
    const MixtureState yL = prim_state(1.0, v0, P0);
    const MixtureState yR = prim_state(0.25, v0, P0);
    const Real n[1] = {1.0};
    const StateVec f = dg::hllc_flux(gm, yL, yR, n);
    // mass flux = upwind density times v0; momentum flux = rho v^2 + P
    CHECK(f[lay.mom(0)] == doctest::Approx(1.0 * v0 * v0 + P0).epsilon(1e-9));
    CHECK(f[lay.species(0)] * 28.97 == doctest::Approx(1.0 * v0).epsilon(1e-9));
    ExactRiemann ex{gamma, 1.0, v0, P0, 0.25, v0, P0};
    ex.solve();
    CHECK(ex.u_star == doctest::Approx(v0).epsilon(1e-6));
    CHECK(ex.p_star == doctest::Approx(P0).epsilon(1e-6));
  }

  SUBCASE("Sod states bracket the exact star values") {
    const MixtureState yL = prim_state(1.0, 0.0, 1.0e5);
    const MixtureState yR = prim_state(0.125, 0.0, 1.0e4);
    ExactRiemann ex{gamma, 1.0, 0.0, 1.0e5, 0.125, 0.0, 1.0e4};
    ex.solve();
    // HLLC star speed from the same wave estimates the flux uses
    const Real n[1] = {1.0};
    const dg::SideProps L = dg::side_props(gm, yL, n);
    const dg::SideProps R = dg::side_props(gm, yR, n);
    const Real vbar = 0.5 * (L.vn + R.vn), cbar = 0.5 * (L.c + R.c);
    const Real SL = std::min(L.vn - L.c, vbar - cbar);
    const Real SR = std::max(R.vn + R.c, vbar + cbar);
    const Real Sstar = (R.P - L.P + L.rho * L.vn * (SL - L.vn) - R.rho * R.vn * (SR - R.vn)) /
                       (L.rho * (SL - L.vn) - R.rho * (SR - R.vn));
    const Real Pstar = L.P + L.rho * (SL - L.vn) * (Sstar - L.vn);
    CHECK(SL < ex.u_star);
    CHECK(SR > ex.u_star);
    // The arithmetic-average wave estimates are diffusive for this strong
    // shock/rarefaction pair; the star values land within ~30% of the exact
    // solution (frozen from the oracle comparison). Exactness holds only for
    // single contacts, checked above.
    CHECK(Sstar == doctest::Approx(ex.u_star).epsilon(0.30));
    CHECK(Pstar == doctest::Approx(ex.p_star).epsilon(0.40));
    CHECK(Sstar > 0);
    CHECK(Pstar > ex.p_star * 0.5);
  }
}

TEST_CASE("HLLC p=0 three-point update stays in G with min entropy bound") {
  auto gm = real_gas();
  StateLayout lay{2, gm.n_species()};
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<Real> uT(350, 3200), uP(5e3, 7e5), uv(-1000, 1000),
      ux(0.0, 1.0), uang(0, 2 * M_PI);
  thermo::AdmissibleParams params;
  int failures = 0;
  const int n_trials = 10000;
  for (int t = 0; t < n_trials; ++t) {
    auto rands = [&](auto& dist) { return dist(rng); };
    (void)rands;
    std::vector<Real> X0(gm.n_species()), X1(gm.n_species()), X2(gm.n_species());
    for (auto& x : X0) x = ux(rng);
    for (auto& x : X1) x = ux(rng);
    for (auto& x : X2) x = ux(rng);
    auto fix = [](std::vector<Real>& X) {
      Real s = 0;
      for (Real x : X) s += x;
      if (s == 0) X[0] = 1;
    };
    fix(X0); fix(X1); fix(X2);
    const MixtureState y = make_state(gm, lay, X0, uT(rng), uP(rng), {uv(rng), uv(rng)});
    const MixtureState y1 = make_state(gm, lay, X1, uT(rng), uP(rng), {uv(rng), uv(rng)});
    const MixtureState y2 = make_state(gm, lay, X2, uT(rng), uP(rng), {uv(rng), uv(rng)});
    const Real a = uang(rng);
    const Real n[2] = {std::cos(a), std::sin(a)};
    const Real nm[2] = {-n[0], -n[1]};

    Real lam = 0;
    for (const MixtureState* s : {&y, &y1, &y2})
      lam = std::max(lam, dg::directional_wave_speed(gm, *s, n));
    const Real L = 1.0;
    const Real dt = 0.5 * L / lam;

    const StateVec f1 = dg::hllc_flux(gm, y, y1, n);
    const StateVec f2 = dg::hllc_flux(gm, y, y2, nm);
    MixtureState ynext = y;
    for (int c = 0; c < lay.ncomp(); ++c) ynext.u[c] -= dt / L * (f1[c] + f2[c]);

    params.sigma = std::min({thermo::entropy_from_state_ext(gm, y),
                             thermo::entropy_from_state_ext(gm, y1),
                             thermo::entropy_from_state_ext(gm, y2)});
    if (!limiter::in_G(gm, ynext, params).admissible) ++failures;
  }
  CHECK(failures == 0);
}
