#include <doctest.h>

#include <cmath>

#include "rxdg/config.hpp"
#include "rxdg/driver.hpp"
#include "rxdg/mesh_gen.hpp"

using namespace rxdg;

namespace {

cli::LoadedMechanism& loaded() {
  static cli::LoadedMechanism lm =
      cli::load_mechanism(std::string(RXDG_SOURCE_DIR) + "/mech/h2o2_ar_9sp.mech");
  return lm;
}

MixtureState mix_state(const thermo::GasModel& gm, StateLayout lay,
                       const std::vector<std::pair<std::string, Real>>& X, Real T,
                       Real P, const std::vector<Real>& v) {
  std::vector<Real> Xv(gm.n_species(), 0.0);
  Real Xs = 0;
  for (const auto& [n, x] : X) {
    Xv[gm.index(n)] = x;
    Xs += x;
  }
  const Real Csum = P / (gm.R0 * T);
  std::vector<Real> C(gm.n_species());
  for (int i = 0; i < gm.n_species(); ++i) C[i] = Xv[i] / Xs * Csum;
  return thermo::state_from_primitive(gm, lay, C, v, T);
}

Real node_x(const dg::Field& f, const mesh::Mesh& msh, int e, int j) {
  const auto& el = msh.elements[e];
  const basis::NodalBasis gb = basis::NodalBasis::geometry(el.shape, el.geom_degree);
  const auto gn = msh.element_geom_nodes(e);
  std::vector<Real> phi(gb.n_basis());
  Real xi[2] = {f.elem_basis(e).node(j, 0), 0};
  gb.eval(xi, phi.data());
  Real x = 0;
  for (int m = 0; m < gb.n_basis(); ++m) x += gn[m] * phi[m];
  return x;
}

} // namespace

TEST_CASE("uniform free stream is untouched by stepping and limiting") {
  auto& lm = loaded();
  StateLayout lay{2, lm.gas.n_species()};
  mesh::RectOptions opt;
  opt.nx = 4;
  opt.ny = 3;
  opt.x1 = 0.04;
  opt.y1 = 0.03;
  opt.jitter = 0.12;
  mesh::Mesh msh = mesh::generate_tri_rect(opt);
  msh.make_periodic(1, 2);
  msh.make_periodic(3, 4);
  dg::TransportOptions topt;
  topt.interp = dg::FluxInterp::modified;
  const dg::TransportOperator op(&lm.gas, &msh, lay, 2, topt);
  const driver::Driver drv(&op, nullptr, {});

  driver::RunState s(dg::Field(&msh, lay, 2));
  const MixtureState y0 = mix_state(lm.gas, lay, {{"AR", 7}, {"H2", 2}, {"O2", 1}},
                                    500.0, 8e4, {150.0, -60.0});
  for (int e = 0; e < msh.n_elements(); ++e)
    for (int j = 0; j < s.field.n_nodes(e); ++j) s.field.set_state(e, j, y0);
  drv.start(s);

  const Real dt = drv.compute_dt(s, 0.2);
  for (int step = 0; step < 12; ++step) drv.ssprk2_step(s, dt);
  Real worst = 0;
  for (int e = 0; e < msh.n_elements(); ++e)
    for (int j = 0; j < s.field.n_nodes(e); ++j)
      for (int c = 0; c < lay.ncomp(); ++c)
        worst = std::max(worst,
                         std::abs(s.field.node_state(e, j)[c] - y0.u[c]) /
                             std::max(std::abs(y0.u[c]), 1e-300));
  CHECK(worst <= 1e-13);
  CHECK(s.limiter_activations == 0);
}

TEST_CASE("cfl time step") {
  auto& lm = loaded();
  StateLayout lay{1, lm.gas.n_species()};
  mesh::Mesh msh = mesh::generate_line_mesh(0, 1, 10);
  const MixtureState quiescent =
      mix_state(lm.gas, lay, {{"AR", 1}}, 300.0, 1e5, {0.0});

  auto dt_for = [&](int p, const MixtureState& y, Real cfl) {
    const dg::TransportOperator op(&lm.gas, &msh, lay, p, {});
    const driver::Driver drv(&op, nullptr, {});
    driver::RunState s(dg::Field(&msh, lay, p));
    for (int e = 0; e < msh.n_elements(); ++e)
      for (int j = 0; j < s.field.n_nodes(e); ++j) s.field.set_state(e, j, y);
    return drv.compute_dt(s, cfl);
  };

  SUBCASE("closed form for a static gas") {
    const Real c = thermo::sound_speed(lm.gas, quiescent);
    const Real h = 0.1;  // (d+1)|k|/|dk| = 2*0.1/2 in 1-D
    for (int p : {0, 1, 2}) {
      const Real expected = 0.1 * h / ((2 * p + 1) * c);
      CHECK(dt_for(p, quiescent, 0.1) == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  SUBCASE("raising p strictly shrinks dt") {
    CHECK(dt_for(2, quiescent, 0.1) < dt_for(1, quiescent, 0.1));
    CHECK(dt_for(1, quiescent, 0.1) < dt_for(0, quiescent, 0.1));
  }

  SUBCASE("faster flow shrinks dt monotonically") {
    const MixtureState slow = mix_state(lm.gas, lay, {{"AR", 1}}, 300.0, 1e5, {500.0});
    const MixtureState fast = mix_state(lm.gas, lay, {{"AR", 1}}, 300.0, 1e5, {1000.0});
    CHECK(dt_for(1, fast, 0.1) < dt_for(1, slow, 0.1));
  }
}

TEST_CASE("multicomponent shock tube: conservation and entropy minimum") {
  auto& lm = loaded();
  StateLayout lay{1, lm.gas.n_species()};
  mesh::Mesh msh = mesh::generate_line_mesh(0, 0.1, 40);  // walls at both ends
  dg::TransportOptions topt;
  topt.interp = dg::FluxInterp::modified;
  const dg::TransportOperator op(&lm.gas, &msh, lay, 2, topt);
  driver::DriverOptions dopt;
  dopt.limiter = driver::LimiterMode::entropy_local;
  const driver::Driver drv(&op, nullptr, dopt);

  driver::RunState s(dg::Field(&msh, lay, 2));
  for (int e = 0; e < msh.n_elements(); ++e)
    for (int j = 0; j < s.field.n_nodes(e); ++j) {
      const Real x = node_x(s.field, msh, e, j);
      const bool left = x < 0.05;
      s.field.set_state(
          e, j,
          left ? mix_state(lm.gas, lay, {{"AR", 8}, {"H2O", 2}}, 1200.0, 4e5, {0.0})
               : mix_state(lm.gas, lay, {{"AR", 7}, {"H2", 2}, {"O2", 1}}, 300.0,
                           1e4, {0.0}));
    }
  drv.start(s);

  auto min_s_of = [&] {
    const auto mins = op.element_min_entropy(s.field);
    return limiter::entropy_bound_global(mins);
  };

  Real smin_prev = min_s_of();
  int entropy_violations = 0;
  for (int step = 0; step < 500; ++step) {
    const Real dt = drv.compute_dt(s, 0.1);
    drv.retry_on_violation(s, dt);
    const Real smin = min_s_of();
    if (smin < smin_prev - 1e-9) ++entropy_violations;
    smin_prev = smin;
  }
  const driver::AuditReport a = drv.conservation_audit(s);
  CHECK(a.mass_err <= 1e-12);
  CHECK(a.energy_err <= 1e-12);
  CHECK(entropy_violations == 0);
}

TEST_CASE("retry on violation") {
  auto& lm = loaded();
  StateLayout lay{1, lm.gas.n_species()};
  mesh::Mesh msh = mesh::generate_line_mesh(0, 0.1, 20);
  dg::TransportOptions topt;
  topt.interp = dg::FluxInterp::modified;
  const dg::TransportOperator op(&lm.gas, &msh, lay, 2, topt);
  driver::DriverOptions dopt;
  dopt.limiter = driver::LimiterMode::entropy_local;
  const driver::Driver drv(&op, nullptr, dopt);

  SUBCASE("benign flow accepts the first attempt") {
    driver::RunState s(dg::Field(&msh, lay, 2));
    for (int e = 0; e < msh.n_elements(); ++e)
      for (int j = 0; j < s.field.n_nodes(e); ++j)
        s.field.set_state(e, j, mix_state(lm.gas, lay, {{"AR", 1}}, 400.0, 1e5, {50.0}));
    drv.start(s);
    const Real dt = drv.compute_dt(s, 0.1);
    const Real used = drv.retry_on_violation(s, dt);
    CHECK(used == dt);
    CHECK(s.retry_count == 0);
  }

  SUBCASE("strong expansion retries, then succeeds") {
    driver::RunState s(dg::Field(&msh, lay, 2));
    for (int e = 0; e < msh.n_elements(); ++e)
      for (int j = 0; j < s.field.n_nodes(e); ++j) {
        const Real x = node_x(s.field, msh, e, j);
        // receding streams leave a near-vacuum in the middle
        const Real v = x < 0.05 ? -1800.0 : 1800.0;
        s.field.set_state(e, j,
                          mix_state(lm.gas, lay, {{"AR", 1}}, 350.0, 3e4, {v}));
      }
    drv.start(s);
    const Real floor_before = op.theorem1_dt_floor(s.field);
    const Real dt_big = 40.0 * drv.compute_dt(s, 0.1);
    const Real used = drv.retry_on_violation(s, dt_big);
    CHECK(used < dt_big);
    CHECK(s.retry_count >= 1);
    // a few stage-speed shrinks below the step-start floor are tolerated
    CHECK(used >= floor_before * 1e-3);
  }

  SUBCASE("steps at the theorem floor are accepted") {
    driver::RunState s(dg::Field(&msh, lay, 2));
    for (int e = 0; e < msh.n_elements(); ++e)
      for (int j = 0; j < s.field.n_nodes(e); ++j) {
        const Real x = node_x(s.field, msh, e, j);
        const Real v = x < 0.05 ? -1200.0 : 1200.0;
        s.field.set_state(e, j,
                          mix_state(lm.gas, lay, {{"AR", 1}}, 350.0, 3e4, {v}));
      }
    drv.start(s);
    const Real floor = op.theorem1_dt_floor(s.field);
    const Real used = drv.retry_on_violation(s, 0.5 * floor);
    CHECK(used == 0.5 * floor);
    CHECK(s.retry_count == 0);
  }
}

TEST_CASE("strang splitting") {
  auto& lm = loaded();
  StateLayout lay{1, lm.gas.n_species()};

  SUBCASE("zero-rate mechanism reduces to two transport half steps") {
    chem::ReactionMechanism inert;
    inert.element_names = lm.mech.element_names;
    inert.atom_matrix = lm.mech.atom_matrix;
    mesh::Mesh msh = mesh::generate_line_mesh(0, 0.1, 10);
    msh.make_periodic(1, 2);
    const dg::TransportOperator op(&lm.gas, &msh, lay, 2, {});
    driver::DriverOptions dopt;
    const driver::Driver with_mech(&op, &inert, dopt);
    const driver::Driver transport_only(&op, nullptr, dopt);

    auto init = [&](driver::RunState& s) {
      for (int e = 0; e < msh.n_elements(); ++e)
        for (int j = 0; j < s.field.n_nodes(e); ++j) {
          const Real x = node_x(s.field, msh, e, j);
          s.field.set_state(
              e, j,
              mix_state(lm.gas, lay, {{"AR", 7}, {"H2", 2 + std::sin(20 * x)}, {"O2", 1}},
                        500.0, 1e5, {80.0}));
        }
    };
    driver::RunState a(dg::Field(&msh, lay, 2)), b(dg::Field(&msh, lay, 2));
    init(a);
    init(b);
    const Real dt = 1e-7;
    with_mech.strang_advance(a, dt);
    transport_only.ssprk2_step(b, 0.5 * dt);
    transport_only.ssprk2_step(b, 0.5 * dt);
    CHECK(a.field.data() == b.field.data());
  }

  SUBCASE("uniform reacting box matches the 0-D reactor oracle") {
    mesh::Mesh msh = mesh::generate_line_mesh(0, 0.01, 4);  // wall box
    const dg::TransportOperator op(&lm.gas, &msh, lay, 1, {});
    driver::DriverOptions dopt;
    dopt.limiter = driver::LimiterMode::entropy_local;
    const driver::Driver drv(&op, &lm.mech, dopt);

    const MixtureState y0 = mix_state(lm.gas, lay, {{"H2", 2}, {"O2", 1}, {"AR", 7}},
                                      1500.0, 101325.0, {0.0});
    driver::RunState s(dg::Field(&msh, lay, 1));
    for (int e = 0; e < msh.n_elements(); ++e)
      for (int j = 0; j < s.field.n_nodes(e); ++j) s.field.set_state(e, j, y0);
    drv.start(s);

    const Real dt = 2e-7;
    for (int step = 0; step < 100; ++step) drv.strang_advance(s, dt);

    const MixtureState ref =
        chem::reactor_oracle(lm.gas, lm.mech, y0, 100 * dt, 40000);
    const Real T_ref = thermo::temperature_from_state_ext(lm.gas, ref);
    const Real T_run = thermo::temperature_from_state_ext(lm.gas, s.field.state(2, 1));
    CHECK(T_run == doctest::Approx(T_ref).epsilon(1e-6));
  }

  SUBCASE("self-convergence of the splitting is second order") {
    mesh::Mesh msh = mesh::generate_line_mesh(0, 0.004, 4);
    msh.make_periodic(1, 2);
    const dg::TransportOperator op(&lm.gas, &msh, lay, 1, {});
    driver::DriverOptions dopt;
    dopt.limiter = driver::LimiterMode::positivity_only;
    const driver::Driver drv(&op, &lm.mech, dopt);

    auto run = [&](Real dt, Real t_end) {
      driver::RunState s(dg::Field(&msh, lay, 1));
      for (int e = 0; e < msh.n_elements(); ++e)
        for (int j = 0; j < s.field.n_nodes(e); ++j) {
          const Real x = node_x(s.field, msh, e, j);
          const Real T = 1450.0 + 80.0 * std::sin(2 * M_PI * x / 0.004);
          s.field.set_state(
              e, j, mix_state(lm.gas, lay, {{"H2", 2}, {"O2", 1}, {"AR", 7}}, T,
                              101325.0, {30.0}));
        }
      drv.start(s);
      const long n = std::lround(t_end / dt);
      for (long k = 0; k < n; ++k) drv.strang_advance(s, dt);
      return s.field.data();
    };

    const Real t_end = 1.6e-6;
    const auto ref = run(t_end / 128, t_end);
    const auto c1 = run(t_end / 8, t_end);
    const auto c2 = run(t_end / 16, t_end);
    Real e1 = 0, e2 = 0, scale = 0;
    for (size_t k = 0; k < ref.size(); ++k) {
      e1 = std::max(e1, std::abs(c1[k] - ref[k]));
      e2 = std::max(e2, std::abs(c2[k] - ref[k]));
      scale = std::max(scale, std::abs(ref[k]));
    }
    REQUIRE(e2 > 0);
    const Real order = std::log2(e1 / e2);
    CHECK(order >= 1.5);
    CHECK(order <= 2.8);
  }
}

TEST_CASE("audit is immune to limiter-only manipulation") {
  auto& lm = loaded();
  StateLayout lay{1, lm.gas.n_species()};
  mesh::Mesh msh = mesh::generate_line_mesh(0, 0.1, 10);
  const dg::TransportOperator op(&lm.gas, &msh, lay, 2, {});
  driver::DriverOptions dopt;
  dopt.limiter = driver::LimiterMode::positivity_only;
  const driver::Driver drv(&op, &lm.mech, dopt);

  driver::RunState s(dg::Field(&msh, lay, 2));
  for (int e = 0; e < msh.n_elements(); ++e)
    for (int j = 0; j < s.field.n_nodes(e); ++j) {
      const Real x = node_x(s.field, msh, e, j);
      s.field.set_state(e, j,
                        mix_state(lm.gas, lay, {{"AR", 7}, {"H2", 2}, {"O2", 1}},
                                  400.0 + 800.0 * x, 1e5, {0.0}));
    }
  const auto sigma = drv.entropy_bounds(s.field);
  for (int e = 0; e < msh.n_elements(); e += 3) {
    auto u = s.field.node_state(e, 0);
    u[lay.species(lm.gas.index("H2"))] *= -0.5;
  }
  const driver::AuditReport before = drv.conservation_audit(s);
  drv.limit_all(s, sigma);
  CHECK(s.limiter_activations > 0);
  const driver::AuditReport after = drv.conservation_audit(s);
  CHECK(after.mass == doctest::Approx(before.mass).epsilon(1e-13));
  CHECK(after.energy == doctest::Approx(before.energy).epsilon(1e-13));
  for (size_t k = 0; k < before.atoms.size(); ++k)
    CHECK(after.atoms[k] == doctest::Approx(before.atoms[k]).epsilon(1e-13));
}

TEST_CASE("smooth advection convergence (two levels)") {
  auto& lm = loaded();
  StateLayout lay{1, lm.gas.n_species()};

  auto l2_error = [&](int n) {
    mesh::Mesh msh = mesh::generate_line_mesh(0, 1, n);
    msh.make_periodic(1, 2);
    dg::TransportOptions topt;
    topt.interp = dg::FluxInterp::modified;
    const dg::TransportOperator op(&lm.gas, &msh, lay, 2, topt);
    driver::DriverOptions dopt;
    dopt.limiter = driver::LimiterMode::entropy_local;
    dopt.scheme = driver::TimeScheme::ssprk3;
    const driver::Driver drv(&op, nullptr, dopt);

    const Real v0 = 100.0, T0 = 600.0, P0 = 1e5;
    auto exact = [&](Real x) {
      // advected mole-fraction bubble, uniform T and P
      const Real b = std::exp(-std::pow(std::sin(M_PI * x), 2) / 0.08);
      return std::vector<std::pair<std::string, Real>>{
          {"AR", 7.0 + 2.0 * b}, {"H2", 2.0}, {"O2", 1.0}};
    };
    driver::RunState s(dg::Field(&msh, lay, 2));
    for (int e = 0; e < msh.n_elements(); ++e)
      for (int j = 0; j < s.field.n_nodes(e); ++j) {
        const Real x = node_x(s.field, msh, e, j);
        s.field.set_state(e, j, mix_state(lm.gas, lay, exact(x), T0, P0, {v0}));
      }
    drv.start(s);
    const Real t_end = 0.2 / v0;
    while (s.t < t_end * (1 - 1e-12)) {
      Real dt = std::min(drv.compute_dt(s, 0.1), t_end - s.t);
      drv.ssprk2_step(s, dt);
      s.t += dt;
    }
    // L2 error of the advected AR concentration
    Real err2 = 0;
    const int iAR = lm.gas.index("AR");
    for (int e = 0; e < msh.n_elements(); ++e) {
      const auto& ref = op.reference(e);
      for (int q = 0; q < ref.vol_rule.npts(); ++q) {
        Real xi[2] = {ref.vol_rule.pt(q, 0), 0};
        const MixtureState y = dg::interpolate(s.field, e, xi);
        const Real x = op.geometry(e).xvol[q];
        const MixtureState ye =
            mix_state(lm.gas, lay, exact(x - v0 * s.t), T0, P0, {v0});
        const Real jw = op.geometry(e).jac_det[q] * ref.vol_rule.weights[q];
        err2 += jw * std::pow(y.C(iAR) - ye.C(iAR), 2);
      }
    }
    return std::sqrt(err2);
  };

  const Real e1 = l2_error(12);
  const Real e2 = l2_error(24);
  const Real order = std::log2(e1 / e2);
  CHECK(order >= 2.5);
}
