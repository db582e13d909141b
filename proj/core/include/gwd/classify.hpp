#pragma once

/// @file classify.hpp
/// Genuine-nonlinearity classifier for systems of variational wave equations:
/// eikonal matrix, numerical null space, Lambda coefficients of the nonlinear
/// terms, transport coefficients along rays, and a sample-based verdict.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gwd/dual.hpp"

namespace gwd {

/// Coefficient family A^{alpha beta}_{pq}(g) with the symmetries
/// A^{ab}_{pq} = A^{ba}_{pq} = A^{ab}_{qp}. dA is the g-derivative
/// dA^{ab}_{qr}/dg^p; the default is exact dual-number differentiation of A.
struct VariationalSystem {
  int d = 1;  // spatial dimension; indices run over 0..d
  int m = 1;  // number of dependent variables

  std::function<double(std::span<const double> g, int a, int b, int p, int q)> A;
  std::function<Dual1<1>(std::span<const Dual1<1>> g, int a, int b, int p,
                         int q)>
      A_dual;
  // dA(g, a, b, q, r, p) = dA^{ab}_{qr}/dg^p
  std::function<double(std::span<const double> g, int a, int b, int q, int r,
                       int p)>
      dA;
};

/// Wrap a functor callable as F(span<const S> g, a, b, p, q) -> S for both
/// S = double and S = Dual1<1>; dA defaults to the dual-number derivative.
template <class F>
VariationalSystem make_system(int d, int m, F f) {
  VariationalSystem sys;
  sys.d = d;
  sys.m = m;
  sys.A = [f](std::span<const double> g, int a, int b, int p, int q) {
    return f(g, a, b, p, q);
  };
  sys.A_dual = [f](std::span<const Dual1<1>> g, int a, int b, int p, int q) {
    return f(g, a, b, p, q);
  };
  sys.dA = [f](std::span<const double> g, int a, int b, int q, int r, int p) {
    std::vector<Dual1<1>> gd(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) gd[i] = Dual1<1>(g[i]);
    gd[p].d[0] = 1.0;
    return f(std::span<const Dual1<1>>(gd), a, b, q, r).d[0];
  };
  return sys;
}

/// Symmetry check of A at random probe points; throws on violation.
void validate_symmetries(const VariationalSystem& sys, std::uint64_t seed,
                         double tol = 1e-12);

using MatrixD = std::vector<std::vector<double>>;

/// C_pq = u_a u_b A^{ab}_{pq}(g0).
MatrixD eikonal_matrix(const VariationalSystem& sys,
                       std::span<const double> g0, std::span<const double> du);

struct CharacteristicData {
  MatrixD c;
  std::vector<std::vector<double>> null_basis;  // orthonormal kernel vectors
  int multiplicity = 0;
};

/// Orthonormal basis of the numerical kernel: singular values below
/// tol * max|eigenvalue|. Multiplicity 0 means du is not characteristic.
CharacteristicData null_space(const MatrixD& c, double tol = 1e-8);

/// Lambda_ijk = u_a u_b dA^{ab}_{qr}/dg^p R_i^p R_j^q R_k^r.
std::vector<double> lambda_tensor(const VariationalSystem& sys,
                                  std::span<const double> g0,
                                  std::span<const double> du,
                                  const std::vector<std::vector<double>>& basis);
inline double lambda_entry(const std::vector<double>& lam, int n, int i, int j,
                           int k) {
  return lam[(i * n + j) * n + k];
}

/// Spacetime fields entering the transport coefficients, each callable with
/// dual arguments for exact differentiation of the composites.
struct TransportFields {
  // g0 components and the phase gradient du as functions of x in R^{d+1}
  std::function<std::vector<Dual1<1>>(std::span<const Dual1<1>> x)> g0, du, r;
};

struct TransportCoefficients {
  std::vector<double> ray;  // components of the ray derivative
  double n = 0.0;           // transport coefficient
};

TransportCoefficients transport_coefficients(const VariationalSystem& sys,
                                             const TransportFields& fields,
                                             std::span<const double> point);

enum class Verdict { LinearlyDegenerate, GenuinelyNonlinearCandidate,
                     Indeterminate };

const char* verdict_name(Verdict v);

struct SamplePoint {
  std::vector<double> g0;
  std::vector<double> du;
};

struct SampleResult {
  SamplePoint point;
  int multiplicity = 0;
  double max_abs_lambda = 0.0;
  bool characteristic = false;
};

struct ClassificationReport {
  Verdict verdict = Verdict::Indeterminate;
  std::vector<SampleResult> samples;
  int rejected = 0;  // non-characteristic samples
};

/// Sample-based classification per the genuine-nonlinearity definition; the
/// universal quantifier cannot be decided numerically, so mixed samples give
/// an indeterminate verdict.
ClassificationReport classify_characteristic(
    const VariationalSystem& sys, std::span<const SamplePoint> samples,
    double tol = 1e-8);

// -------------------------------------------------------------------------
// built-in systems

/// Scalar wave with speed c(g) given as a polynomial in g, encoded from the
/// Lagrangian (g_t^2 - c^2(g) |grad g|^2) / 2.
VariationalSystem scalar_wave_system(int d, std::vector<double> c_poly);

/// Two decoupled g-independent wave operators sharing one speed: a doubly
/// degenerate characteristic.
VariationalSystem two_component_degenerate_system(int d, double c0);

/// Characteristic covector for the scalar wave at g0: u_t = c(g0) |k|.
std::vector<double> scalar_wave_characteristic(std::span<const double> c_poly,
                                               double g0,
                                               std::span<const double> k);

}  // namespace gwd
