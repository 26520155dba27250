#include <doctest.h>

#include <cmath>

#include "rxdg/config.hpp"
#include "rxdg/mesh_gen.hpp"
#include "rxdg/residual.hpp"

using namespace rxdg;

namespace {

thermo::GasModel real_gas() {
  static thermo::GasModel gm =
      cli::load_mechanism(std::string(RXDG_SOURCE_DIR) + "/mech/h2o2_ar_9sp.mech").gas;
  return gm;
}

MixtureState make_state(const thermo::GasModel& gm, StateLayout lay,
                        const std::vector<Real>& X, Real T, Real P,
                        const std::vector<Real>& v) {
  Real Xs = 0;
  for (Real x : X) Xs += x;
  const Real Csum = P / (gm.R0 * T);
  std::vector<Real> C(X.size());
  for (size_t i = 0; i < X.size(); ++i) C[i] = X[i] / Xs * Csum;
  return thermo::state_from_primitive(gm, lay, C, v, T);
}

void fill_uniform(dg::Field& f, const MixtureState& y) {
  for (int e = 0; e < f.n_elements(); ++e)
    for (int j = 0; j < f.n_nodes(e); ++j) f.set_state(e, j, y);
}

Real residual_scale(const thermo::GasModel& gm, const MixtureState& y) {
  const thermo::StateProps pr = thermo::evaluate_ext(gm, y);
  Real v = 0;
  for (int k = 0; k < y.layout.dim; ++k)
    v += y.rho_v(k) * y.rho_v(k) / (pr.rho * pr.rho);
  const Real lam = std::sqrt(v) + pr.c;
  Real umax = 0;
  for (int c = 0; c < y.layout.ncomp(); ++c) umax = std::max(umax, std::abs(y.u[c]));
  return lam * umax + pr.P;
}

} // namespace

TEST_CASE("free-stream preservation") {
  auto gm = real_gas();
  StateLayout lay{2, gm.n_species()};
  std::vector<Real> X(gm.n_species(), 0.0);
  X[gm.index("AR")] = 7;
  X[gm.index("O2")] = 1;
  X[gm.index("H2")] = 2;

  SUBCASE("periodic box, moving stream, curved elements") {
    mesh::RectOptions opt;
    opt.nx = 5;
    opt.ny = 4;
    opt.jitter = 0.15;
    opt.geom_degree = 2;
    opt.curve_amp = 0.05;
    mesh::Mesh msh = mesh::generate_tri_rect(opt);
    msh.make_periodic(1, 2);
    msh.make_periodic(3, 4);

    const MixtureState y0 = make_state(gm, lay, X, 450.0, 8e4, {210.0, -90.0});
    const Real scale = residual_scale(gm, y0);
    for (dg::FluxInterp mode : {dg::FluxInterp::standard, dg::FluxInterp::modified}) {
      dg::TransportOptions topt;
      topt.interp = mode;
      const dg::TransportOperator op(&gm, &msh, lay, 2, topt);
      dg::Field f(&msh, lay, 2);
      fill_uniform(f, y0);
      dg::Field r(&msh, lay, 2);
      op.residual(f, r);
      Real worst = 0;
      for (Real v : r.data()) worst = std::max(worst, std::abs(v));
      CHECK(worst <= 1e-11 * scale);
    }
  }

  SUBCASE("wall box, quiescent gas") {
    mesh::RectOptions opt;
    opt.nx = 4;
    opt.ny = 3;
    opt.jitter = 0.1;
    mesh::Mesh msh = mesh::generate_tri_rect(opt);
    const MixtureState y0 = make_state(gm, lay, X, 300.0, 6.67e3, {0.0, 0.0});
    const Real scale = residual_scale(gm, y0);
    const dg::TransportOperator op(&gm, &msh, lay, 1, {});
    dg::Field f(&msh, lay, 1);
    fill_uniform(f, y0);
    dg::Field r(&msh, lay, 1);
    op.residual(f, r);
    Real worst = 0;
    for (Real v : r.data()) worst = std::max(worst, std::abs(v));
    CHECK(worst <= 1e-11 * scale);
  }
}

TEST_CASE("p=0 update reduces to the three-point form") {
  auto gm = real_gas();
  StateLayout lay{1, gm.n_species()};
  mesh::Mesh msh = mesh::generate_line_mesh(0, 3, 3);
  msh.make_periodic(1, 2);
  const dg::TransportOperator op(&gm, &msh, lay, 0, {});

  std::vector<Real> X(gm.n_species(), 0.3);
  dg::Field f(&msh, lay, 0);
  const MixtureState y0 = make_state(gm, lay, X, 600.0, 1e5, {150.0});
  const MixtureState y1 = make_state(gm, lay, X, 800.0, 1.4e5, {-60.0});
  const MixtureState y2 = make_state(gm, lay, X, 700.0, 0.9e5, {20.0});
  f.set_state(0, 0, y0);
  f.set_state(1, 0, y1);
  f.set_state(2, 0, y2);
  dg::Field r(&msh, lay, 0);
  op.residual(f, r);

  const Real h = 1.0;
  const Real nl[1] = {-1.0}, nr[1] = {1.0};
  const StateVec fl = dg::hllc_flux(gm, y1, y0, nl);
  const StateVec fr = dg::hllc_flux(gm, y1, y2, nr);
  for (int c = 0; c < lay.ncomp(); ++c) {
    const Real expected = -(fl[c] + fr[c]) / h;
    CHECK(r.node_state(1, 0)[c] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("artificial viscosity sensor") {
  auto gm = real_gas();
  StateLayout lay{1, gm.n_species()};
  mesh::Mesh msh = mesh::generate_line_mesh(0, 1, 12);
  msh.make_periodic(1, 2);
  dg::TransportOptions topt;
  topt.artificial_viscosity = true;
  const dg::TransportOperator op(&gm, &msh, lay, 2, topt);

  std::vector<Real> X(gm.n_species(), 0.0);
  X[gm.index("AR")] = 1;

  SUBCASE("uniform state gives zero") {
    dg::Field f(&msh, lay, 2);
    fill_uniform(f, make_state(gm, lay, X, 500.0, 1e5, {100.0}));
    dg::Field r(&msh, lay, 2);
    op.residual(f, r);
    for (Real nu : op.nu_av()) CHECK(nu <= 1e-12);  // machine zero vs h*lambda ~ 50
  }

  SUBCASE("zero strong residual gives zero regardless of T variation") {
    dg::Field f(&msh, lay, 2);
    fill_uniform(f, make_state(gm, lay, X, 500.0, 1e5, {100.0}));
    // manufactured linear T variation enters through the caller-supplied
    // strong residual, which is zero here
    std::vector<Real> Rs(op.reference(0).vol_rule.npts() * lay.ncomp(), 0.0);
    CHECK(op.artificial_viscosity(f, 0, Rs) == 0.0);
  }

  SUBCASE("resolved shock localizes the viscosity") {
    dg::Field f(&msh, lay, 2);
    const Real x_s = 0.5, w = 1.0 / 24.0;
    for (int e = 0; e < msh.n_elements(); ++e)
      for (int j = 0; j < f.n_nodes(e); ++j) {
        const Real xi = f.elem_basis(e).node(j, 0);
        const Real x = (e + 0.5 * (xi + 1)) / 12.0;
        const Real s = 0.5 * (1 + std::tanh((x - x_s) / w));
        const Real T = 300.0 + 900.0 * s;
        const Real P = 1e5 * (1 + 4.0 * s);
        f.set_state(0, 0, f.state(0, 0));  // no-op, keeps loop shape clear
        f.set_state(e, j, make_state(gm, lay, X, T, P, {50.0 * s}));
      }
    dg::Field r(&msh, lay, 2);
    op.residual(f, r);
    const auto& nu = op.nu_av();
    const int shock_elem = 5;  // contains x = 0.5 on the right half
    Real nu_shock = std::max(nu[5], nu[6]);
    CHECK(nu_shock > 0.0);
    CHECK(nu[(shock_elem + 6) % 12] * 10.0 <= nu_shock);
    CHECK(nu[(shock_elem - 3 + 12) % 12] * 10.0 <= nu_shock);
  }
}

TEST_CASE("semi-discrete conservation over many Euler steps") {
  auto gm = real_gas();
  StateLayout lay{2, gm.n_species()};
  mesh::RectOptions opt;
  opt.nx = 4;
  opt.ny = 3;
  opt.x1 = 0.04;
  opt.y1 = 0.03;
  opt.jitter = 0.1;
  mesh::Mesh msh = mesh::generate_tri_rect(opt);
  msh.make_periodic(1, 2);
  msh.make_periodic(3, 4);
  dg::TransportOptions topt;
  topt.interp = dg::FluxInterp::modified;
  topt.artificial_viscosity = true;
  const dg::TransportOperator op(&gm, &msh, lay, 2, topt);

  std::vector<Real> X(gm.n_species(), 0.0);
  X[gm.index("AR")] = 7;
  X[gm.index("H2")] = 2;
  X[gm.index("O2")] = 1;
  dg::Field f(&msh, lay, 2);
  for (int e = 0; e < msh.n_elements(); ++e) {
    const auto& sb = f.elem_basis(e);
    const auto gn = msh.element_geom_nodes(e);
    const basis::NodalBasis gb =
        basis::NodalBasis::geometry(msh.elements[e].shape, msh.elements[e].geom_degree);
    std::vector<Real> phi(gb.n_basis());
    for (int j = 0; j < f.n_nodes(e); ++j) {
      Real xi[2] = {sb.node(j, 0), sb.node(j, 1)};
      gb.eval(xi, phi.data());
      Real x[2] = {0, 0};
      for (int mn = 0; mn < gb.n_basis(); ++mn)
        for (int k = 0; k < 2; ++k) x[k] += gn[mn * 2 + k] * phi[mn];
      const Real bump =
          std::exp(-std::pow((x[0] - 0.02) / 0.01, 2) - std::pow((x[1] - 0.015) / 0.01, 2));
      const Real T = 400.0 + 150.0 * bump;
      f.set_state(e, j, make_state(gm, lay, X, T, 9e4, {80.0, 20.0}));
    }
  }

  auto totals = [&](const dg::Field& fld) {
    Real mass = 0, energy = 0;
    for (int e = 0; e < msh.n_elements(); ++e) {
      const StateVec avg = op.element_average(fld, e);
      Real rho = 0;
      for (int i = 0; i < lay.n_species; ++i)
        rho += gm.species[i].W * avg[lay.species(i)];
      mass += op.geometry(e).volume * rho;
      energy += op.geometry(e).volume * avg[lay.energy()];
    }
    return std::pair<Real, Real>(mass, energy);
  };

  const auto [m0, e0] = totals(f);
  dg::Field r(&msh, lay, 2);
  const Real dt = 2e-8;
  for (int step = 0; step < 50; ++step) {
    op.residual(f, r);
    for (size_t k = 0; k < f.data().size(); ++k) f.data()[k] += dt * r.data()[k];
  }
  const auto [m1, e1] = totals(f);
  CHECK(std::abs(m1 - m0) <= 1e-12 * std::abs(m0));
  CHECK(std::abs(e1 - e0) <= 1e-12 * std::abs(e0));
}

TEST_CASE("inadmissible trace states are reported") {
  auto gm = real_gas();
  StateLayout lay{1, gm.n_species()};
  mesh::Mesh msh = mesh::generate_line_mesh(0, 1, 2);
  const dg::TransportOperator op(&gm, &msh, lay, 1, {});
  dg::Field f(&msh, lay, 1);
  std::vector<Real> X(gm.n_species(), 0.2);
  fill_uniform(f, make_state(gm, lay, X, 500.0, 1e5, {0.0}));
  f.node_state(1, 0)[lay.energy()] *= -1.0;  // nonphysical energy
  dg::Field r(&msh, lay, 1);
  CHECK_THROWS_AS(op.residual(f, r), InadmissibleTraceState);
}

TEST_CASE("two-element contact pressure equilibrium") {
  auto gm = real_gas();
  StateLayout lay{1, gm.n_species()};
  mesh::Mesh msh = mesh::generate_line_mesh(0, 0.02, 2);
  msh.make_periodic(1, 2);
  const int p = 2;
  const Real P0 = 1e5, v0 = 50.0, L = 0.02;

  auto run = [&](dg::FluxInterp mode, int steps, Real T_amp) {
    dg::TransportOptions topt;
    topt.interp = mode;
    topt.vol_order = 2 * p + 3;  // over-integration
    topt.face_order = 2 * p + 3;
    const dg::TransportOperator op(&gm, &msh, lay, p, topt);
    dg::Field f(&msh, lay, p);
    const Real T0 = 600.0;
    for (int e = 0; e < 2; ++e)
      for (int j = 0; j < f.n_nodes(e); ++j) {
        std::vector<Real> X(gm.n_species(), 0.0);
        if (T_amp == 0) {
          // composition jumps at the interface; equal molar density keeps
          // the temperature continuous
          if (e == 0) X[gm.index("AR")] = 1.0;
          else {
            X[gm.index("H2")] = 2.0;
            X[gm.index("O2")] = 1.0;
          }
          f.set_state(e, j, make_state(gm, lay, X, T0, P0, {v0}));
        } else {
          const Real x = (e + 0.5 * (f.elem_basis(e).node(j, 0) + 1)) * L / 2;
          const Real s = 0.5 * (1 - std::cos(2 * M_PI * x / L));
          X[gm.index("AR")] = 1.0 - 0.8 * s;
          X[gm.index("H2O")] = 0.8 * s;
          f.set_state(e, j, make_state(gm, lay, X, T0 * (1 + T_amp * s), P0, {v0}));
        }
      }
    dg::Field r(&msh, lay, p);
    const Real dt = 2e-7;
    dg::Field u0(&msh, lay, p);
    for (int s = 0; s < steps; ++s) {
      u0 = f;
      op.residual(f, r);
      for (size_t k = 0; k < f.data().size(); ++k) f.data()[k] += dt * r.data()[k];
      op.residual(f, r);
      for (size_t k = 0; k < f.data().size(); ++k)
        f.data()[k] = 0.5 * u0.data()[k] + 0.5 * (f.data()[k] + dt * r.data()[k]);
    }
    Real worst = 0;
    for (int e = 0; e < 2; ++e)
      for (int j = 0; j < f.n_nodes(e); ++j) {
        const thermo::StateProps pr = thermo::evaluate_ext(gm, f.state(e, j));
        worst = std::max(worst, std::abs(pr.P - P0) / P0);
      }
    return worst;
  };

  SUBCASE("temperature-continuous contact stays uniform to machine precision") {
    CHECK(run(dg::FluxInterp::modified, 100, 0.0) <= 1e-10);
  }

  SUBCASE("varying temperature: the modified states alias strictly less") {
    const Real drift_modified = run(dg::FluxInterp::modified, 100, 3e-3);
    const Real drift_standard = run(dg::FluxInterp::standard, 100, 3e-3);
    CHECK(drift_modified < drift_standard);
    CHECK(drift_standard >= 3.0 * drift_modified);  // measured ratio ~10
  }
}
