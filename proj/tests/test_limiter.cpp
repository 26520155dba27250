#include <doctest.h>

#include <cmath>

#include "rxdg/config.hpp"
#include "rxdg/limiter.hpp"
#include "rxdg/mesh_gen.hpp"
#include "rxdg/suites.hpp"

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
  Real Xsum = 0;
  for (Real x : X) Xsum += x;
  const Real Csum = P / (gm.R0 * T);
  std::vector<Real> C(X.size());
  for (size_t i = 0; i < X.size(); ++i) C[i] = X[i] / Xsum * Csum;
  return thermo::state_from_primitive(gm, lay, C, v, T);
}

/// 1-D Lobatto point set for a p-degree line element (endpoints + nodes).
limiter::PointSet line_point_set(int p) {
  const auto b = basis::NodalBasis::solution(basis::Shape::line, p);
  const auto vol = quad::gauss_legendre(p + 2);
  limiter::PointSet D;
  const int nq = vol.npts();
  D.phi.resize(nq + 2, b.n_basis());
  D.avg_weights = Eigen::VectorXd::Zero(b.n_basis());
  std::vector<Real> phi(b.n_basis());
  for (int q = 0; q < nq; ++q) {
    b.eval(&vol.points[q], phi.data());
    for (int j = 0; j < b.n_basis(); ++j) {
      D.phi(q, j) = phi[j];
      D.avg_weights(j) += 0.5 * vol.weights[q] * phi[j];
    }
  }
  for (int side = 0; side < 2; ++side) {
    const Real xi = side == 0 ? -1.0 : 1.0;
    b.eval(&xi, phi.data());
    for (int j = 0; j < b.n_basis(); ++j) D.phi(nq + side, j) = phi[j];
  }
  return D;
}

} // namespace

TEST_CASE("in_G classification") {
  auto gm = real_gas();
  StateLayout lay{2, gm.n_species()};
  std::vector<Real> X(gm.n_species(), 0.0);
  X[gm.index("AR")] = 7;
  X[gm.index("O2")] = 1;
  X[gm.index("H2")] = 2;
  // unburnt pre-shock state of the detonation initialization
  const MixtureState y = make_state(gm, lay, X, 300.0, 6.67e3, {0.0, 0.0});
  const Real s = thermo::entropy_from_state(gm, y);

  thermo::AdmissibleParams params;
  params.sigma = s - 1.0;
  CHECK(limiter::in_G(gm, y, params).admissible);

  MixtureState yc = y;
  yc.C(gm.index("H2O")) = -1e-12;
  const auto r1 = limiter::in_G(gm, yc, params);
  CHECK_FALSE(r1.admissible);
  CHECK(r1.violated == limiter::Constraint::concentration);

  params.sigma = s + 1.0;
  const auto r2 = limiter::in_G(gm, y, params);
  CHECK_FALSE(r2.admissible);
  CHECK(r2.violated == limiter::Constraint::entropy);
}

TEST_CASE("inactive limiter leaves coefficients untouched") {
  auto gm = real_gas();
  StateLayout lay{1, gm.n_species()};
  const int p = 2;
  const limiter::PointSet D = line_point_set(p);
  std::vector<Real> X(gm.n_species(), 0.2);
  std::vector<Real> coeffs;
  for (int j = 0; j <= p; ++j) {
    const MixtureState y =
        make_state(gm, lay, X, 800.0 + 30.0 * j, 1e5 + 2e3 * j, {15.0});
    coeffs.insert(coeffs.end(), y.comps().begin(), y.comps().end());
  }
  const std::vector<Real> before = coeffs;
  thermo::AdmissibleParams params;
  params.sigma = -1e9;
  const auto rep = limiter::limit_element(gm, lay, coeffs, D, params);
  for (Real th : rep.theta) CHECK(th == 1.0);
  for (bool a : rep.activated) CHECK_FALSE(a);
  CHECK(coeffs == before);
}

TEST_CASE("scaling formula on a hand-built undershoot") {
  // Nodal concentrations -1 and 3 average to 1, giving the textbook factor
  // 1 / (1 - (-1)) = 0.5 and a limited minimum of (nearly) zero.
  SUBCASE("single species: the density stage binds with the same factor") {
    thermo::GasModel gm;
    thermo::SpeciesThermo sp;
    sp.name = "G";
    sp.W = 10.0;
    sp.ranges = {{50, 6000, {0.0, 700.0}, 0.0, 150.0}};
    gm.species = {sp};
    gm.validate();
    StateLayout lay{1, 1};
    const limiter::PointSet D = line_point_set(1);
    std::vector<Real> coeffs;
    for (Real C : {-1.0, 3.0}) {
      MixtureState y(lay);
      y.C(0) = C;
      y.rho_et() = 10.0 * 700.0 * 600.0;
      coeffs.insert(coeffs.end(), y.comps().begin(), y.comps().end());
    }
    thermo::AdmissibleParams params;
    params.sigma = -1e30;
    const auto rep = limiter::limit_element(gm, lay, coeffs, D, params);
    CHECK(rep.activated[0]);
    CHECK(rep.theta[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(coeffs[lay.species(0)] >= 0.0);
    CHECK(coeffs[lay.species(0)] <= 2e-11);  // eps / W
  }

  SUBCASE("two species: the concentration stage fires at exactly 0.5") {
    thermo::GasModel gm;
    for (int i = 0; i < 2; ++i) {
      thermo::SpeciesThermo sp;
      sp.name = i == 0 ? "A" : "B";
      sp.W = i == 0 ? 2.0 : 40.0;
      sp.ranges = {{50, 6000, {0.0, 700.0}, 0.0, 150.0 + 10.0 * i}};
      gm.species.push_back(sp);
    }
    gm.validate();
    StateLayout lay{1, 2};
    const limiter::PointSet D = line_point_set(1);
    std::vector<Real> coeffs;
    for (Real CA : {-1.0, 3.0}) {
      MixtureState y(lay);
      y.C(0) = CA;
      y.C(1) = 5.0;  // keeps the density positive everywhere
      y.rho_et() = (2.0 * 1.0 + 40.0 * 5.0) * 700.0 * 800.0;
      coeffs.insert(coeffs.end(), y.comps().begin(), y.comps().end());
    }
    thermo::AdmissibleParams params;
    params.sigma = -1e30;
    const auto rep = limiter::limit_element(gm, lay, coeffs, D, params);
    CHECK_FALSE(rep.activated[0]);
    CHECK(rep.activated[1]);
    CHECK(rep.theta[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(coeffs[lay.species(0)] == 0.0);
    CHECK(coeffs[lay.ncomp() + lay.species(0)] == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("average inadmissible raises") {
  auto gm = real_gas();
  StateLayout lay{1, gm.n_species()};
  const limiter::PointSet D = line_point_set(1);
  std::vector<Real> coeffs(2 * lay.ncomp(), 0.0);  // zero everything
  thermo::AdmissibleParams params;
  CHECK_THROWS_AS(limiter::limit_element(gm, lay, coeffs, D, params),
                  AverageInadmissible);
}

TEST_CASE("monotone activation in sigma") {
  auto gm = real_gas();
  StateLayout lay{1, gm.n_species()};
  const int p = 2;
  const limiter::PointSet D = line_point_set(p);
  std::vector<Real> X(gm.n_species(), 0.15);
  std::vector<Real> base;
  for (int j = 0; j <= p; ++j) {
    const MixtureState y =
        make_state(gm, lay, X, 500.0 + 400.0 * j, 1e5 + 9e4 * j, {25.0 * j});
    base.insert(base.end(), y.comps().begin(), y.comps().end());
  }
  StateVec avg(lay.ncomp(), 0.0);
  for (int j = 0; j <= p; ++j)
    for (int c = 0; c < lay.ncomp(); ++c) avg[c] += D.avg_weights(j) * base[j * lay.ncomp() + c];
  const Real sbar = thermo::entropy_from_state_ext(gm, MixtureState(lay, avg));

  Real prev_theta = 1.0;
  for (Real off : {0.20, 0.10, 0.05, 0.02, 0.01}) {
    std::vector<Real> coeffs = base;
    thermo::AdmissibleParams params;
    params.sigma = sbar - off * std::abs(sbar);
    const auto rep = limiter::limit_element(gm, lay, coeffs, D, params);
    CHECK(rep.theta[3] <= prev_theta + 1e-13);
    prev_theta = rep.theta[3];
  }
}

TEST_CASE("entropy bounds") {
  const mesh::Mesh msh = mesh::generate_line_mesh(0, 1, 4);
  const std::vector<Real> mins{5.0, 3.0, 4.0, 6.0};
  CHECK(limiter::entropy_bound_local(msh, mins, 0) == 3.0);
  CHECK(limiter::entropy_bound_local(msh, mins, 1) == 3.0);
  CHECK(limiter::entropy_bound_local(msh, mins, 3) == 4.0);
  CHECK(limiter::entropy_bound_global(mins) == 3.0);
  Real min_local = 1e300;
  for (int e = 0; e < 4; ++e)
    min_local = std::min(min_local, limiter::entropy_bound_local(msh, mins, e));
  CHECK(min_local == limiter::entropy_bound_global(mins));
  for (int e = 0; e < 4; ++e)
    CHECK(limiter::entropy_bound_local(msh, mins, e) >=
          limiter::entropy_bound_global(mins));
}

TEST_CASE("randomized limiter property trials (short)") {
  const auto r = suites::limiter_suite(400, 314);
  INFO(r.detail);
  CHECK(r.pass);
}
