#pragma once

/// @file ricci.hpp
/// Order-by-order connection and Ricci expansions of the two-scale metric
/// ansatz, brute-force extraction of the same coefficients from the exact
/// assembled metric at finite epsilon, per-component evaluators for the
/// standard-form metric, and the match between the reduced field equations
/// and the targeted Ricci components.
///
/// All pointwise derivatives are exact (nested first-order dual numbers);
/// no grid stencils enter this module.

#include <array>
#include <functional>
#include <random>
#include <span>
#include <string>

#include "gwd/dual.hpp"
#include "gwd/manufactured.hpp"

namespace gwd {

/// Independent variables of the expansion: the stretched phase theta, the two
/// stretched transverse variables, and the four spacetime coordinates.
struct ExpansionPoint {
  double theta = 0.0;
  double eta2 = 0.0;
  double eta3 = 0.0;
  std::array<double, 4> x{};
};

constexpr int kVars = 7;  // (theta, eta2, eta3, x0, x1, x2, x3)

using Sym4Jet = std::array<std::array<Jet2<7>, 4>, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;
using Gamma4 = std::array<std::array<std::array<double, 4>, 4>, 4>;

struct MetricExpansion {
  std::function<Sym4Jet(const ExpansionPoint&)> g0, g1, g2;
  std::array<double, 4> du{1.0, 0.0, 0.0, 0.0};  // u_mu
  std::array<std::array<double, 4>, 2> dy{{{0, 0, 1, 0}, {0, 0, 0, 1}}};

  /// Zero blocks of the standard form must be exactly zero and the leading
  /// metric invertible.
  void check_block_structure(const ExpansionPoint& p) const;
};

/// Standard-form metric assembled from analytic plane-polarized fields of
/// (theta, eta, v); an empty T means the T = 0 gauge.
MetricExpansion plane_polarized_metric(const AnalyticFieldSet& f);

/// Random smooth metric orders respecting the block structure, with mildly
/// randomized constant phase gradients.
MetricExpansion random_metric(std::mt19937_64& rng, double amplitude = 0.1,
                              bool randomize_phases = true);

struct ChristoffelOrders {
  Gamma4 order_m2, order_m1, order_0;  // eps^-2, eps^-1, eps^0
};

ChristoffelOrders christoffel_orders(const MetricExpansion& m,
                                     const ExpansionPoint& p);

struct RicciOrders {
  Mat4 r4, r3, r2;  // coefficients of eps^-4, eps^-3, eps^-2
};

RicciOrders ricci_orders(const MetricExpansion& m, const ExpansionPoint& p);

/// Per-component evaluators written out for the standard-form metric,
/// including the transverse-block curvature of the leading metric.
struct ComponentRicci {
  double r4_00 = 0.0;
  double r3_00 = 0.0;
  std::array<double, 2> r3_0a{};                 // a = 2, 3
  double r2_01 = 0.0;
  std::array<std::array<double, 2>, 2> r2_ab{};  // a, b = 2, 3
  std::array<std::array<double, 2>, 2> star_ab{};
};

ComponentRicci component_ricci(const MetricExpansion& m,
                               const ExpansionPoint& p);

/// Exact connection and Ricci tensor of the assembled metric
/// g = g0 + eps g1 + eps^2 g2 at finite eps, with spacetime derivatives
/// expanded through the stretched variables.
Gamma4 exact_christoffel(const MetricExpansion& m, const ExpansionPoint& p,
                         double eps);
Mat4 exact_ricci(const MetricExpansion& m, const ExpansionPoint& p,
                 double eps);

/// Coefficient extraction by polynomial fit through samples at the given
/// eps values (Richardson table); defaults to the 4-point ladder.
std::vector<double> default_extraction_eps();

ChristoffelOrders christoffel_orders_bruteforce(
    const MetricExpansion& m, const ExpansionPoint& p,
    std::span<const double> eps_values);

RicciOrders ricci_orders_bruteforce(const MetricExpansion& m,
                                    const ExpansionPoint& p,
                                    std::span<const double> eps_values);

struct ZeroPatternReport {
  bool ok = true;
  double worst = 0.0;
  std::string worst_component;
};

/// Components the expansion leaves identically zero: at eps^-4 everything but
/// (00); at eps^-3 everything but (00), (0a); at eps^-2 everything but (00),
/// (01), (0a), (ab). In the plane-polarized gauge (03), (23) vanish as well.
ZeroPatternReport check_zero_pattern(const RicciOrders& r,
                                     bool plane_polarized, double tol = 1e-10);

struct ReducedMatchEntry {
  std::string component;
  double ricci = 0.0;
  double residual = 0.0;  // matched reduced-equation residual
  bool ricci_zero = false;
  bool residual_zero = false;
  double ratio = 0.0;  // ricci / residual when both are nonzero
};

struct ReducedMatchReport {
  std::array<ReducedMatchEntry, 5> entries;
  double zero_tol = 0.0;
};

/// Evaluates the five targeted Ricci components of the assembled
/// plane-polarized expansion next to the residuals of the five reduced field
/// equations at one point.
ReducedMatchReport reduced_equation_match(const AnalyticFieldSet& fields,
                                          double theta, double eta, double v,
                                          double zero_tol = 1e-9);

}  // namespace gwd
