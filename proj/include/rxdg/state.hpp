#pragma once

#include <array>
#include <cassert>
#include <cstring>
#include <span>

namespace rxdg {

using Real = double;

/// Hard cap on conservative components (d + 1 + n_s); enough for 3D with
/// up to 20 species.
inline constexpr int kMaxComp = 24;

/// Index layout of the conservative state vector
/// (rho*v_1, ..., rho*v_d, rho*e_t, C_1, ..., C_ns).
struct StateLayout {
  int dim = 0;
  int n_species = 0;

  int ncomp() const { return dim + 1 + n_species; }
  int mom(int k) const { return k; }
  int energy() const { return dim; }
  int species(int i) const { return dim + 1 + i; }

  bool operator==(const StateLayout&) const = default;
};

/// Fixed-capacity vector for per-point states; avoids heap traffic in the
/// per-quadrature-point hot loops.
template <class T, int Cap>
class SmallVec {
public:
  SmallVec() = default;
  explicit SmallVec(int n, T v = T{}) : n_(n) {
    assert(n <= Cap);
    for (int i = 0; i < n; ++i) d_[i] = v;
  }
  SmallVec(std::span<const T> s) : n_(static_cast<int>(s.size())) {
    assert(n_ <= Cap);
    std::memcpy(d_.data(), s.data(), sizeof(T) * s.size());
  }

  int size() const { return n_; }
  void resize(int n, T v = T{}) {
    assert(n <= Cap);
    for (int i = n_; i < n; ++i) d_[i] = v;
    n_ = n;
  }
  T& operator[](int i) { return d_[i]; }
  const T& operator[](int i) const { return d_[i]; }
  T* data() { return d_.data(); }
  const T* data() const { return d_.data(); }

  operator std::span<T>() { return {d_.data(), static_cast<size_t>(n_)}; }
  operator std::span<const T>() const { return {d_.data(), static_cast<size_t>(n_)}; }

  SmallVec& operator+=(const SmallVec& o) {
    for (int i = 0; i < n_; ++i) d_[i] += o.d_[i];
    return *this;
  }
  SmallVec& operator-=(const SmallVec& o) {
    for (int i = 0; i < n_; ++i) d_[i] -= o.d_[i];
    return *this;
  }
  SmallVec& operator*=(T a) {
    for (int i = 0; i < n_; ++i) d_[i] *= a;
    return *this;
  }

private:
  std::array<T, Cap> d_{};
  int n_ = 0;
};

using StateVec = SmallVec<Real, kMaxComp>;

/// Conservative state at a point. Raw states may be inadmissible;
/// admissibility is a query, not an invariant.
struct MixtureState {
  StateLayout layout;
  StateVec u;

  MixtureState() = default;
  explicit MixtureState(StateLayout l) : layout(l), u(l.ncomp(), 0.0) {}
  MixtureState(StateLayout l, std::span<const Real> vals) : layout(l), u(vals) {
    assert(static_cast<int>(vals.size()) == l.ncomp());
  }

  Real rho_v(int k) const { return u[layout.mom(k)]; }
  Real& rho_v(int k) { return u[layout.mom(k)]; }
  Real rho_et() const { return u[layout.energy()]; }
  Real& rho_et() { return u[layout.energy()]; }
  Real C(int i) const { return u[layout.species(i)]; }
  Real& C(int i) { return u[layout.species(i)]; }

  std::span<const Real> comps() const { return u; }
  std::span<Real> comps() { return u; }
};

} // namespace rxdg
