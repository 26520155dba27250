#include "rxdg/quadrature.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

#include "rxdg/errors.hpp"

namespace rxdg::quad {

Real QuadratureRule::weight_sum() const {
  Real s = 0;
  for (Real w : weights) s += w;
  return s;
}

namespace {

/// Legendre P_n(x) and its derivative.
std::pair<Real, Real> legendre(int n, Real x) {
  Real p0 = 1, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const Real dp = n * (x * p1 - p0) / (x * x - 1);
  return {p1, dp};
}

} // namespace

QuadratureRule gauss_legendre(int n) {
  assert(n >= 1);
  QuadratureRule r;
  r.dim = 1;
  r.points.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    Real x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = legendre(n, x);
      const Real dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    auto [p, dp] = legendre(n, x);
    (void)p;
    r.points[i] = x;
    r.weights[i] = 2.0 / ((1 - x * x) * dp * dp);
  }
  // enforce symmetry exactly
  for (int i = 0; i < n / 2; ++i) {
    const Real x = 0.5 * (r.points[n - 1 - i] - r.points[i]);
    r.points[i] = -x;
    r.points[n - 1 - i] = x;
    const Real w = 0.5 * (r.weights[i] + r.weights[n - 1 - i]);
    r.weights[i] = r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.points[n / 2] = 0.0;
  return r;
}

QuadratureRule gauss_lobatto(int n) {
  assert(n >= 2);
  QuadratureRule r;
  r.dim = 1;
  r.points.resize(n);
  r.weights.resize(n);
  r.points[0] = -1.0;
  r.points[n - 1] = 1.0;
  const Real wend = 2.0 / (n * (n - 1));
  r.weights[0] = r.weights[n - 1] = wend;
  for (int i = 1; i < n - 1; ++i) {
    // interior points: roots of P'_{n-1}
    Real x = std::cos(std::numbers::pi * i / (n - 1));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = legendre(n - 1, x);
      // Newton on dp: d2p from the Legendre ODE
      const Real d2p = (2 * x * dp - (n - 1) * n * p) / (1 - x * x);
      const Real dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    auto [p, dp] = legendre(n - 1, x);
    (void)dp;
    r.points[n - 1 - i] = x;
    r.weights[n - 1 - i] = 2.0 / (n * (n - 1) * p * p);
  }
  for (int i = 0; i < n / 2; ++i) {
    const Real x = 0.5 * (r.points[n - 1 - i] - r.points[i]);
    r.points[i] = -x;
    r.points[n - 1 - i] = x;
    const Real w = 0.5 * (r.weights[i] + r.weights[n - 1 - i]);
    r.weights[i] = r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.points[n / 2] = 0.0;
  return r;
}

namespace {

struct TriGroup {
  Real a, b, c;  // barycentric coordinates of the generator
  Real w;        // weight, normalized to unit total
};

void push_group(QuadratureRule& r, const TriGroup& g) {
  // distinct permutations of (a, b, c) as barycentric coordinates on the
  // unit right triangle; vertex order (0,0), (1,0), (0,1).
  auto add = [&](Real l1, Real l2, Real l3) {
    r.points.push_back(l2);
    r.points.push_back(l3);
    r.weights.push_back(g.w * 0.5);  // reference area is 1/2
    (void)l1;
  };
  const Real a = g.a, b = g.b, c = g.c;
  if (a == b && b == c) {
    add(a, b, c);
  } else if (b == c) {
    add(a, b, c);
    add(b, a, c);
    add(b, c, a);
  } else {
    add(a, b, c);
    add(a, c, b);
    add(b, a, c);
    add(b, c, a);
    add(c, a, b);
    add(c, b, a);
  }
}

QuadratureRule dunavant(int order) {
  QuadratureRule r;
  r.dim = 2;
  auto groups = [&]() -> std::vector<TriGroup> {
    switch (order) {
      case 1:
        return {{1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0}};
      case 2:
        return {{2.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3}};
      case 4:
        return {{0.108103018168070, 0.445948490915965, 0.445948490915965,
                 0.223381589678011},
                {0.816847572980459, 0.091576213509771, 0.091576213509771,
                 0.109951743655322}};
      case 5:
        return {{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225},
                {0.059715871789770, 0.470142064105115, 0.470142064105115,
                 0.132394152788506},
                {0.797426985353087, 0.101286507323456, 0.101286507323456,
                 0.125939180544827}};
      case 6:
        return {{0.501426509658179, 0.249286745170910, 0.249286745170910,
                 0.116786275726379},
                {0.873821971016996, 0.063089014491502, 0.063089014491502,
                 0.050844906370207},
                {0.053145049844817, 0.310352451033784, 0.636502499121399,
                 0.082851075618374}};
      case 8:
        return {{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.144315607677786},
                {0.081414823414554, 0.459292588292723, 0.459292588292723,
                 0.095091634267285},
                {0.658861384496480, 0.170569307751760, 0.170569307751760,
                 0.103217370534718},
                {0.898905543365938, 0.050547228317031, 0.050547228317031,
                 0.032458497623198},
                {0.008394777409958, 0.263112829634638, 0.728492392955404,
                 0.027230314174435}};
      default:
        return {};
    }
  }();
  for (const auto& g : groups) push_group(r, g);
  return r;
}

} // namespace

QuadratureRule triangle_rule(int order) {
  // Map the requested order up to the next all-positive symmetric table.
  static const int table[] = {1, 1, 2, 4, 4, 5, 6, 8, 8};
  if (order >= 0 && order <= 8) {
    return dunavant(table[order]);
  }
  return triangle_collapsed_rule(order);
}

QuadratureRule triangle_collapsed_rule(int order) {
  // Duffy transform xi1 = a(1-b), xi2 = b with (a,b) in [0,1]^2 and
  // Jacobian (1-b); 1D Gauss in each direction keeps weights positive.
  const int n = order / 2 + 2;
  const QuadratureRule g = gauss_legendre(n);
  QuadratureRule r;
  r.dim = 2;
  for (int i = 0; i < n; ++i) {
    const Real a = 0.5 * (g.points[i] + 1);
    const Real wa = 0.5 * g.weights[i];
    for (int j = 0; j < n; ++j) {
      const Real b = 0.5 * (g.points[j] + 1);
      const Real wb = 0.5 * g.weights[j];
      r.points.push_back(a * (1 - b));
      r.points.push_back(b);
      r.weights.push_back(wa * wb * (1 - b));
    }
  }
  return r;
}

QuadratureRule quad_rule(int order) {
  const int n = order / 2 + 1;
  const QuadratureRule g = gauss_legendre(n);
  QuadratureRule r;
  r.dim = 2;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      r.points.push_back(g.points[i]);
      r.points.push_back(g.points[j]);
      r.weights.push_back(g.weights[i] * g.weights[j]);
    }
  return r;
}

QuadratureRule quad_lobatto_rule(int n_per_dir) {
  const QuadratureRule g = gauss_lobatto(n_per_dir);
  QuadratureRule r;
  r.dim = 2;
  for (int i = 0; i < n_per_dir; ++i)
    for (int j = 0; j < n_per_dir; ++j) {
      r.points.push_back(g.points[i]);
      r.points.push_back(g.points[j]);
      r.weights.push_back(g.weights[i] * g.weights[j]);
    }
  return r;
}

QuadratureRule line_rule(int order) {
  return gauss_legendre(order / 2 + 1);
}

QuadratureRule point_rule() {
  QuadratureRule r;
  r.dim = 0;
  r.points = {};
  r.weights = {1.0};
  return r;
}

} // namespace rxdg::quad
