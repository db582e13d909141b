#pragma once

/// @file dual.hpp
/// Forward-mode dual numbers with a fixed number of partials. Nesting
/// DualN<DualN<double,N>,N> gives exact second derivatives (first-order
/// duals applied twice).

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

namespace gwd {

template <class T, int N>
struct DualN {
  T v{};
  std::array<T, N> d{};

  DualN() = default;
  DualN(double c) : v(c) {}  // NOLINT: implicit promotion of constants
  template <class U = T,
            class = std::enable_if_t<!std::is_same_v<U, double>>>
  DualN(const T& value) : v(value) {}

  DualN& operator+=(const DualN& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  DualN& operator-=(const DualN& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
};

// scalar_value: collapse nested duals to the underlying double
inline double scalar_value(double x) { return x; }
template <class T, int N>
double scalar_value(const DualN<T, N>& x) {
  return scalar_value(x.v);
}

template <class T, int N>
DualN<T, N> operator+(const DualN<T, N>& a, const DualN<T, N>& b) {
  DualN<T, N> r;
  r.v = a.v + b.v;
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}
template <class T, int N>
DualN<T, N> operator-(const DualN<T, N>& a, const DualN<T, N>& b) {
  DualN<T, N> r;
  r.v = a.v - b.v;
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}
template <class T, int N>
DualN<T, N> operator-(const DualN<T, N>& a) {
  DualN<T, N> r;
  r.v = -a.v;
  for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
  return r;
}
template <class T, int N>
DualN<T, N> operator*(const DualN<T, N>& a, const DualN<T, N>& b) {
  DualN<T, N> r;
  r.v = a.v * b.v;
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
template <class T, int N>
DualN<T, N> operator/(const DualN<T, N>& a, const DualN<T, N>& b) {
  DualN<T, N> r;
  r.v = a.v / b.v;
  const T inv2 = T(1.0) / (b.v * b.v);
  for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv2;
  return r;
}

template <class T, int N>
DualN<T, N> operator+(const DualN<T, N>& a, double c) {
  DualN<T, N> r = a;
  r.v += T(c);
  return r;
}
template <class T, int N>
DualN<T, N> operator+(double c, const DualN<T, N>& a) {
  return a + c;
}
template <class T, int N>
DualN<T, N> operator-(const DualN<T, N>& a, double c) {
  DualN<T, N> r = a;
  r.v -= T(c);
  return r;
}
template <class T, int N>
DualN<T, N> operator-(double c, const DualN<T, N>& a) {
  return DualN<T, N>(c) - a;
}
template <class T, int N>
DualN<T, N> operator*(const DualN<T, N>& a, double c) {
  DualN<T, N> r;
  r.v = a.v * T(c);
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * T(c);
  return r;
}
template <class T, int N>
DualN<T, N> operator*(double c, const DualN<T, N>& a) {
  return a * c;
}
template <class T, int N>
DualN<T, N> operator/(const DualN<T, N>& a, double c) {
  return a * (1.0 / c);
}
template <class T, int N>
DualN<T, N> operator/(double c, const DualN<T, N>& a) {
  return DualN<T, N>(c) / a;
}

using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;
using std::tanh;

template <class T, int N>
DualN<T, N> exp(const DualN<T, N>& a) {
  DualN<T, N> r;
  r.v = exp(a.v);
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * r.v;
  return r;
}
template <class T, int N>
DualN<T, N> log(const DualN<T, N>& a) {
  DualN<T, N> r;
  r.v = log(a.v);
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] / a.v;
  return r;
}
template <class T, int N>
DualN<T, N> sin(const DualN<T, N>& a) {
  DualN<T, N> r;
  r.v = sin(a.v);
  const T c = cos(a.v);
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * c;
  return r;
}
template <class T, int N>
DualN<T, N> cos(const DualN<T, N>& a) {
  DualN<T, N> r;
  r.v = cos(a.v);
  const T s = -sin(a.v);
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * s;
  return r;
}
template <class T, int N>
DualN<T, N> sqrt(const DualN<T, N>& a) {
  DualN<T, N> r;
  r.v = sqrt(a.v);
  const T half_inv = T(0.5) / r.v;
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * half_inv;
  return r;
}
template <class T, int N>
DualN<T, N> tanh(const DualN<T, N>& a) {
  DualN<T, N> r;
  r.v = tanh(a.v);
  const T sech2 = T(1.0) - r.v * r.v;
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * sech2;
  return r;
}

template <int N>
using Dual1 = DualN<double, N>;
template <int N>
using Dual2 = DualN<DualN<double, N>, N>;

/// Seed the i-th of N independent variables for a first-order pass.
template <int N>
Dual1<N> seed1(double x, int i) {
  Dual1<N> r(x);
  r.d[i] = 1.0;
  return r;
}

/// Seed the i-th of N independent variables for a second-order pass.
template <int N>
Dual2<N> seed2(double x, int i) {
  Dual2<N> r;
  r.v = seed1<N>(x, i);
  r.d[i] = Dual1<N>(1.0);
  return r;
}

/// Value, gradient, Hessian of a scalar function of N variables.
template <int N>
struct Jet2 {
  double val = 0.0;
  std::array<double, N> g{};
  std::array<std::array<double, N>, N> h{};
};

template <int N>
Jet2<N> to_jet(const Dual2<N>& r) {
  Jet2<N> j;
  j.val = r.v.v;
  for (int i = 0; i < N; ++i) {
    j.g[i] = r.v.d[i];
    for (int k = 0; k < N; ++k) j.h[i][k] = r.d[i].d[k];
  }
  return j;
}

/// Evaluate f(theta, eta, v) with fully seeded second-order duals.
template <class F>
Jet2<3> jet2_of(const F& f, double theta, double eta, double v) {
  return to_jet<3>(f(seed2<3>(theta, 0), seed2<3>(eta, 1), seed2<3>(v, 2)));
}

}  // namespace gwd
