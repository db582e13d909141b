#pragma once

/// @file fields.hpp
/// Type-erased analytic scalar fields of (theta, eta, v) with exact first and
/// second derivatives via dual numbers, plus random smooth field generators
/// for verification sweeps.

#include <array>
#include <functional>
#include <random>
#include <vector>

#include "gwd/dual.hpp"

namespace gwd {

struct AnalyticField3 {
  std::function<double(double, double, double)> value;
  std::function<Jet2<3>(double, double, double)> jet;

  explicit operator bool() const { return static_cast<bool>(value); }
};

/// Wrap a functor callable as f(S,S,S)->S for S = double and S = Dual2<3>.
template <class F>
AnalyticField3 make_field(F f) {
  AnalyticField3 field;
  field.value = [f](double t, double e, double v) { return f(t, e, v); };
  field.jet = [f](double t, double e, double v) { return jet2_of(f, t, e, v); };
  return field;
}

inline AnalyticField3 zero_field() {
  return make_field([](auto t, auto, auto) { return 0.0 * t; });
}

/// Compactly supported C^3 bump: (4 s (1-s))^4 for s in (0,1), else 0.
/// The first three derivatives vanish at the support edges, so second-order
/// stencils keep uniform O(h^2) truncation across the edge.
template <class S>
S quartic_bump(const S& x, double lo, double hi) {
  const double xs = scalar_value(x);
  if (xs <= lo || xs >= hi) return S(0.0);
  const S s = (x - lo) / (hi - lo);
  const S q = 4.0 * s * (1.0 - s);
  const S q2 = q * q;
  return q2 * q2;
}

/// Sum of sinusoidal waves a*sin(k.th*theta + k.et*eta + k.v*v + phase).
struct TrigField3 {
  struct Wave {
    double amp, k_theta, k_eta, k_v, phase;
  };
  std::vector<Wave> waves;

  template <class S>
  S operator()(const S& theta, const S& eta, const S& v) const {
    S acc(0.0);
    for (const auto& w : waves) {
      acc += w.amp * sin(w.k_theta * theta + w.k_eta * eta + w.k_v * v + w.phase);
    }
    return acc;
  }
};

/// Random smooth bounded field: n_waves waves with |k| <= k_max and total
/// amplitude `amplitude`.
TrigField3 random_trig_field(std::mt19937_64& rng, double amplitude,
                             double k_max = 1.0, int n_waves = 3);

}  // namespace gwd
