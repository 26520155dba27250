#include "rxdg/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace rxdg::thermo {

namespace {

Real poly_eval(const std::vector<Real>& b, Real T) {
  Real acc = 0;
  for (size_t k = b.size(); k-- > 0;) acc = acc * T + b[k];
  return acc;
}

Real poly_deriv(const std::vector<Real>& b, Real T) {
  Real acc = 0;
  for (size_t k = b.size(); k-- > 1;) acc = acc * T + static_cast<Real>(k) * b[k];
  return acc;
}

constexpr Real kHugeNegEntropy = kEntropySentinel;

} // namespace

const CaloricRange& SpeciesThermo::range_for(Real T) const {
  for (const auto& r : ranges) {
    if (T <= r.T_hi) return r;
  }
  return ranges.back();
}

bool SpeciesThermo::in_range(Real T) const { return T >= T_lo() && T <= T_hi(); }

Real SpeciesThermo::u(Real T) const { return poly_eval(range_for(T).b, T); }

Real SpeciesThermo::cv(Real T) const { return poly_deriv(range_for(T).b, T); }

Real SpeciesThermo::s_fit(Real T, Real R0) const {
  const CaloricRange& r = range_for(T);
  const Real Rs = R0 / W;
  Real s = (r.b.size() > 1 ? r.b[1] + Rs : Rs) * std::log(T) + r.s_const;
  Real Tk = 1.0;  // T^{k-1}
  for (size_t k = 2; k < r.b.size(); ++k) {
    Tk *= T;
    s += static_cast<Real>(k) / static_cast<Real>(k - 1) * r.b[k] * Tk;
  }
  return s;
}

Real SpeciesThermo::h(Real T, Real R0) const {
  const CaloricRange& r = range_for(T);
  return poly_eval(r.b, T) + (R0 / W) * T + r.h_const;
}

Real SpeciesThermo::u_ext(Real T) const {
  if (T < T_lo()) return u(T_lo()) + cv(T_lo()) * (T - T_lo());
  if (T > T_hi()) return u(T_hi()) + cv(T_hi()) * (T - T_hi());
  return u(T);
}

Real SpeciesThermo::cv_ext(Real T) const {
  return cv(std::clamp(T, T_lo(), T_hi()));
}

Real SpeciesThermo::s_fit_ext(Real T, Real R0) const {
  const Real Tc = std::clamp(T, T_lo(), T_hi());
  if (Tc == T) return s_fit(T, R0);
  const Real cp = cv(Tc) + R0 / W;
  return s_fit(Tc, R0) + cp * std::log(T / Tc);
}

int GasModel::index(std::string_view name) const {
  for (int i = 0; i < n_species(); ++i)
    if (species[i].name == name) return i;
  return -1;
}

Real GasModel::T_min() const {
  Real t = 0;
  for (const auto& sp : species) t = std::max(t, sp.T_lo());
  return t;
}

Real GasModel::T_max() const {
  Real t = std::numeric_limits<Real>::max();
  for (const auto& sp : species) t = std::min(t, sp.T_hi());
  return t;
}

void GasModel::validate() const {
  if (species.empty()) throw ValidationError("gas model has no species");
  std::set<std::string> names;
  for (const auto& sp : species) {
    if (!names.insert(sp.name).second)
      throw ValidationError("duplicate species name: " + sp.name);
    if (!(sp.W > 0))
      throw ValidationError("species " + sp.name + ": molecular weight must be positive");
    if (sp.ranges.empty())
      throw ValidationError("species " + sp.name + ": no fitted ranges");
    for (size_t j = 0; j < sp.ranges.size(); ++j) {
      const auto& r = sp.ranges[j];
      if (!(r.T_lo < r.T_hi))
        throw ValidationError("species " + sp.name + ": empty temperature range");
      if (j > 0) {
        const Real gap = std::abs(r.T_lo - sp.ranges[j - 1].T_hi);
        if (gap > 1e-9 * r.T_hi)
          throw ValidationError("species " + sp.name + ": ranges not contiguous");
      }
      // c_v must stay positive across the declared range.
      const int n_sample = 120;
      for (int s = 0; s <= n_sample; ++s) {
        const Real T = r.T_lo + (r.T_hi - r.T_lo) * s / n_sample;
        if (!(poly_deriv(r.b, T) > 0)) {
          std::ostringstream os;
          os << "species " << sp.name << ": c_v(T) <= 0 at T = " << T << " K";
          throw ValidationError(os.str());
        }
      }
    }
  }
}

Real density(const GasModel& gm, std::span<const Real> C) {
  Real rho = 0;
  for (int i = 0; i < gm.n_species(); ++i) rho += gm.species[i].W * C[i];
  return rho;
}

MixtureProps mixture_props(const GasModel& gm, std::span<const Real> C, Real T) {
  const Real rho = density(gm, C);
  if (!(rho > 0)) throw ZeroDensity("mixture_props: nonpositive density");
  Real u = 0, cv = 0, h = 0, Csum = 0;
  for (int i = 0; i < gm.n_species(); ++i) {
    if (C[i] == 0) continue;
    const auto& sp = gm.species[i];
    if (!sp.in_range(T)) {
      std::ostringstream os;
      os << "mixture_props: T = " << T << " K outside fit of species " << sp.name;
      throw TemperatureOutOfRange(os.str());
    }
    const Real Yi = sp.W * C[i] / rho;
    u += Yi * sp.u(T);
    cv += Yi * sp.cv(T);
    h += Yi * sp.h(T, gm.R0);
    Csum += C[i];
  }
  const Real cp = cv + gm.R0 * Csum / rho;
  const Real P = gm.R0 * T * Csum;
  return {u, cv, cp, h, P};
}

Real mixture_entropy(const GasModel& gm, std::span<const Real> C, Real T, Real P) {
  if (!(P > 0)) throw NonphysicalPressure("mixture_entropy: P <= 0");
  const Real rho = density(gm, C);
  if (!(rho > 0)) throw ZeroDensity("mixture_entropy: nonpositive density");
  Real Csum = 0;
  for (int i = 0; i < gm.n_species(); ++i) Csum += C[i];
  Real s = 0;
  for (int i = 0; i < gm.n_species(); ++i) {
    if (C[i] == 0) continue;  // 0 log 0 = 0
    const auto& sp = gm.species[i];
    if (!sp.in_range(T)) {
      std::ostringstream os;
      os << "mixture_entropy: T = " << T << " K outside fit of species " << sp.name;
      throw TemperatureOutOfRange(os.str());
    }
    const Real Yi = sp.W * C[i] / rho;
    const Real Xi = C[i] / Csum;
    s += Yi * (sp.s_fit(T, gm.R0) - gm.R0 / sp.W * std::log(Xi * P / gm.P_ref));
  }
  return s;
}

namespace {

struct TargetU {
  const GasModel* gm;
  const MixtureState* y;
  Real rho;
  Real u_target;
};

TargetU make_target(const GasModel& gm, const MixtureState& y) {
  const int ns = y.layout.n_species;
  Real rho = 0;
  for (int i = 0; i < ns; ++i) rho += gm.species[i].W * y.C(i);
  if (!(rho > 0)) throw ZeroDensity("temperature_from_state: nonpositive density");
  Real ke = 0;
  for (int k = 0; k < y.layout.dim; ++k) ke += y.rho_v(k) * y.rho_v(k);
  ke /= 2 * rho;
  return {&gm, &y, rho, (y.rho_et() - ke) / rho};
}

template <bool Extended>
Real mixture_u(const GasModel& gm, const MixtureState& y, Real rho, Real T) {
  Real u = 0;
  for (int i = 0; i < y.layout.n_species; ++i) {
    const Real Ci = y.C(i);
    if (Ci == 0) continue;
    const auto& sp = gm.species[i];
    u += sp.W * Ci / rho * (Extended ? sp.u_ext(T) : sp.u(T));
  }
  return u;
}

template <bool Extended>
Real mixture_cv(const GasModel& gm, const MixtureState& y, Real rho, Real T) {
  Real cv = 0;
  for (int i = 0; i < y.layout.n_species; ++i) {
    const Real Ci = y.C(i);
    if (Ci == 0) continue;
    const auto& sp = gm.species[i];
    cv += sp.W * Ci / rho * (Extended ? sp.cv_ext(T) : sp.cv(T));
  }
  return cv;
}

template <bool Extended>
Real invert_temperature(const GasModel& gm, const MixtureState& y, Real T_hint) {
  const TargetU tgt = make_target(gm, y);
  Real lo = gm.T_min(), hi = gm.T_max();

  if constexpr (Extended) {
    // Linear tails: solve directly when outside the fitted span.
    const Real u_lo = mixture_u<true>(gm, y, tgt.rho, lo);
    if (tgt.u_target < u_lo) {
      const Real cv_lo = mixture_cv<true>(gm, y, tgt.rho, lo);
      const Real T = lo + (tgt.u_target - u_lo) / cv_lo;
      if (!(T > 0))
        throw NoRoot("temperature_from_state_ext: nonpositive extended temperature");
      return T;
    }
    const Real u_hi = mixture_u<true>(gm, y, tgt.rho, hi);
    if (tgt.u_target > u_hi) {
      const Real cv_hi = mixture_cv<true>(gm, y, tgt.rho, hi);
      return hi + (tgt.u_target - u_hi) / cv_hi;
    }
  } else {
    if (tgt.u_target < mixture_u<false>(gm, y, tgt.rho, lo) ||
        tgt.u_target > mixture_u<false>(gm, y, tgt.rho, hi)) {
      std::ostringstream os;
      os << "temperature_from_state: internal energy " << tgt.u_target
         << " J/kg outside fitted caloric range";
      throw NoRoot(os.str());
    }
  }

  // converge well past the documented 1e-10|u| + 1e-8 guarantee so the
  // temperature itself is resolved to ~1e-10 K
  const Real tol = 1e-13 * std::abs(tgt.u_target) + 1e-10;
  Real T = (T_hint > lo && T_hint < hi) ? T_hint : 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    const Real f = mixture_u<Extended>(gm, y, tgt.rho, T) - tgt.u_target;
    if (std::abs(f) <= tol) return T;
    if (f > 0) hi = T; else lo = T;
    const Real cv = mixture_cv<Extended>(gm, y, tgt.rho, T);
    Real Tn = T - f / cv;
    if (!(Tn > lo && Tn < hi)) Tn = 0.5 * (lo + hi);  // bisection fallback
    T = Tn;
  }
  // Newton budget exhausted; bisect the bracket to tolerance.
  for (int it = 0; it < 200; ++it) {
    T = 0.5 * (lo + hi);
    const Real f = mixture_u<Extended>(gm, y, tgt.rho, T) - tgt.u_target;
    if (std::abs(f) <= tol || hi - lo < 1e-13 * T) return T;
    if (f > 0) hi = T; else lo = T;
  }
  return T;
}

} // namespace

Real temperature_from_state(const GasModel& gm, const MixtureState& y, Real T_hint) {
  return invert_temperature<false>(gm, y, T_hint);
}

Real temperature_from_state_ext(const GasModel& gm, const MixtureState& y, Real T_hint) {
  return invert_temperature<true>(gm, y, T_hint);
}

ShiftedQuantities shifted_quantities(const GasModel& gm, const MixtureState& y) {
  const int ns = y.layout.n_species;
  Real rho = 0, rho_u0 = 0;
  for (int i = 0; i < ns; ++i) {
    rho += gm.species[i].W * y.C(i);
    rho_u0 += gm.species[i].W * y.C(i) * gm.species[i].u0;
  }
  if (!(rho > 0)) throw ZeroDensity("shifted_quantities: nonpositive density");
  Real mom2 = 0;
  for (int k = 0; k < y.layout.dim; ++k) mom2 += y.rho_v(k) * y.rho_v(k);
  const Real Z = rho * y.rho_et() - 0.5 * mom2 - rho * rho_u0;
  return {Z / (rho * rho), Z, Z / rho};
}

Real entropy_from_state(const GasModel& gm, const MixtureState& y) {
  const Real T = temperature_from_state(gm, y);
  Real Csum = 0;
  for (int i = 0; i < y.layout.n_species; ++i) Csum += y.C(i);
  const Real P = gm.R0 * T * Csum;
  return mixture_entropy(gm, y.comps().subspan(y.layout.species(0)), T, P);
}

Real entropy_from_state_ext(const GasModel& gm, const MixtureState& y, Real T_hint) {
  Real T;
  try {
    T = temperature_from_state_ext(gm, y, T_hint);
  } catch (const NoRoot&) {
    return kHugeNegEntropy;
  } catch (const ZeroDensity&) {
    return kHugeNegEntropy;
  }
  if (!(T > 0)) return kHugeNegEntropy;
  const int ns = y.layout.n_species;
  Real rho = 0, Csum = 0;
  for (int i = 0; i < ns; ++i) {
    rho += gm.species[i].W * y.C(i);
    Csum += y.C(i);
  }
  const Real P = gm.R0 * T * Csum;
  if (!(P > 0)) return kHugeNegEntropy;
  Real s = 0;
  for (int i = 0; i < ns; ++i) {
    const Real Ci = y.C(i);
    if (Ci == 0) continue;
    if (Ci < 0) return kHugeNegEntropy;
    const auto& sp = gm.species[i];
    const Real Yi = sp.W * Ci / rho;
    const Real Xi = Ci / Csum;
    s += Yi * (sp.s_fit_ext(T, gm.R0) - gm.R0 / sp.W * std::log(Xi * P / gm.P_ref));
  }
  return s;
}

Real entropy_density_chi(const GasModel& gm, const MixtureState& y, Real sigma) {
  const Real rho = density(gm, y.comps().subspan(y.layout.species(0)));
  if (!(rho > 0)) throw ZeroDensity("entropy_density_chi: nonpositive density");
  return rho * (entropy_from_state(gm, y) - sigma);
}

Real entropy_density_chi_ext(const GasModel& gm, const MixtureState& y, Real sigma,
                             Real T_hint) {
  const Real rho = density(gm, y.comps().subspan(y.layout.species(0)));
  if (!(rho > 0)) return -std::numeric_limits<Real>::max();
  const Real s = entropy_from_state_ext(gm, y, T_hint);
  if (s == kHugeNegEntropy) return rho * kHugeNegEntropy;
  return rho * (s - sigma);
}

Real sound_speed(const GasModel& gm, const MixtureState& y) {
  const StateProps pr = evaluate(gm, y);
  return pr.c;
}

namespace {

template <bool Extended>
StateProps evaluate_impl(const GasModel& gm, const MixtureState& y, Real T_hint) {
  const int ns = y.layout.n_species;
  Real rho = 0, Csum = 0;
  for (int i = 0; i < ns; ++i) {
    rho += gm.species[i].W * y.C(i);
    Csum += y.C(i);
  }
  if (!(rho > 0)) throw ZeroDensity("evaluate: nonpositive density");
  const Real T = Extended ? temperature_from_state_ext(gm, y, T_hint)
                          : temperature_from_state(gm, y, T_hint);
  const Real P = gm.R0 * T * Csum;
  if (!(P > 0)) throw NonphysicalPressure("evaluate: nonpositive pressure");
  Real u = 0, cv = 0, s = 0;
  for (int i = 0; i < ns; ++i) {
    const Real Ci = y.C(i);
    if (Ci == 0) continue;
    const auto& sp = gm.species[i];
    const Real Yi = sp.W * Ci / rho;
    const Real Xi = Ci / Csum;
    if constexpr (Extended) {
      u += Yi * sp.u_ext(T);
      cv += Yi * sp.cv_ext(T);
      s += Yi * (sp.s_fit_ext(T, gm.R0) - gm.R0 / sp.W * std::log(Xi * P / gm.P_ref));
    } else {
      if (!sp.in_range(T))
        throw TemperatureOutOfRange("evaluate: T outside fit of species " + sp.name);
      u += Yi * sp.u(T);
      cv += Yi * sp.cv(T);
      s += Yi * (sp.s_fit(T, gm.R0) - gm.R0 / sp.W * std::log(Xi * P / gm.P_ref));
    }
  }
  const Real cp = cv + gm.R0 * Csum / rho;
  const Real c = std::sqrt(cp / cv * P / rho);
  return {rho, T, u, P, s, cv, cp, c};
}

} // namespace

StateProps evaluate(const GasModel& gm, const MixtureState& y, Real T_hint) {
  return evaluate_impl<false>(gm, y, T_hint);
}

StateProps evaluate_ext(const GasModel& gm, const MixtureState& y, Real T_hint) {
  return evaluate_impl<true>(gm, y, T_hint);
}

MixtureState state_from_primitive(const GasModel& gm, StateLayout layout,
                                  std::span<const Real> C,
                                  std::span<const Real> v, Real T) {
  MixtureState y(layout);
  for (int i = 0; i < layout.n_species; ++i) y.C(i) = C[i];
  const Real rho = density(gm, C);
  if (!(rho > 0)) throw ZeroDensity("state_from_primitive: nonpositive density");
  Real ke = 0;
  for (int k = 0; k < layout.dim; ++k) {
    y.rho_v(k) = rho * v[k];
    ke += v[k] * v[k];
  }
  const MixtureProps pr = mixture_props(gm, C, T);
  y.rho_et() = rho * (pr.u + 0.5 * ke);
  return y;
}

} // namespace rxdg::thermo
