#pragma once

/// @file einstein.hpp
/// The plane-polarized diffractive reduction of the vacuum Einstein equations
/// on a characteristic (theta, eta, v) grid: the constrained Goursat march of
/// the (U+V), (U+V+M), U wave equations with Y recovered from its linear
/// theta-ODE at every level, the colliding-plane-wave specialization, the
/// constraint-propagation monitor, and the small-amplitude cross-check
/// against the parabolic approximation.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gwd/grid.hpp"

namespace gwd {

struct FieldSet {
  GridFunction U, V, M, Y;
  std::optional<GridFunction> T;  // absent means the T = 0 gauge

  const Grid3& grid() const { return U.grid(); }
  void validate() const;  // shared grid and finite entries
};

struct AuxFields {
  GridFunction phi;  // D_eta M - e^U Y_theta
  GridFunction psi;  // D_eta (U+V)
};

/// e^U (f_eta + Y f_theta) with second-order stencils.
GridFunction apply_D_eta(const FieldSet& fields, const GridFunction& f,
                         BoundaryMode eta_mode = BoundaryMode::OneSided);

/// Recomputed from the fields on every call; never stored stale.
AuxFields make_aux_fields(const FieldSet& fields,
                          BoundaryMode eta_mode = BoundaryMode::OneSided);

struct ConstraintField {
  GridFunction F;  // U_thth - (U_th^2 + V_th^2)/2 + U_th M_th
  std::vector<double> max_abs_by_v;
};

ConstraintField constraint_residual(const FieldSet& fields);

/// Characteristic initial-boundary data: (U,V,M) on v = 0 as functions of
/// (theta, eta); (U,V,M) and (Y, Y_theta) on theta = 0 as functions of
/// (eta, v).
struct BoundaryData {
  std::function<double(double theta, double eta)> u0, v0, m0;
  std::function<double(double eta, double v)> u1, v1, m1;
  std::function<double(double eta, double v)> y0, y1;
};

enum class ConstraintPolicy { Off, Warn, Error };

struct EvolveOptions {
  BoundaryMode eta_mode = BoundaryMode::OneSided;
  double fixed_point_tol = 1e-12;
  int max_iterations = 50;
  double damping = 1.0;  // falls back to 0.5 once on nonconvergence
  double field_cap = 30.0;
  double corner_tol = 1e-8;
  double constraint_tol = 1e-3;
  ConstraintPolicy constraint_check = ConstraintPolicy::Warn;
  double drift_warn_factor = 10.0;  // warn when max|F| grows past factor * initial

  // manufactured forcing of the marched combinations (U+V+M), (U+V), U and of
  // the Y equation, evaluated at nodes
  std::function<double(double, double, double)> source_q, source_p, source_u,
      source_y;
};

struct EvolveReport {
  std::vector<double> constraint_max_by_v;
  int max_level_iterations = 0;
  long total_sweeps = 0;
  bool used_damping = false;
  std::vector<std::string> warnings;
};

FieldSet evolve(const BoundaryData& data, const Grid3& grid,
                const EvolveOptions& opt = {}, EvolveReport* report = nullptr);

/// Linear second-order theta-ODE for Y at every (eta, v) column, integrated
/// by the classical 4th-order one-step method on the first-order system.
GridFunction solve_y(const GridFunction& U, const GridFunction& V,
                     const GridFunction& M,
                     const std::function<double(double eta, double v)>& y0,
                     const std::function<double(double eta, double v)>& y1,
                     BoundaryMode eta_mode = BoundaryMode::OneSided,
                     const std::function<double(double, double, double)>&
                         source = nullptr);

/// Y'' = c1(th) Y' + c0(th) Y + r(th) from callable coefficients; exposed for
/// high-order integration against analytic coefficients.
std::vector<double> integrate_y_column(
    const std::function<double(double)>& c1,
    const std::function<double(double)>& c0,
    const std::function<double(double)>& r, double y_at0, double dy_at0,
    double theta0, double h, int n);

struct CollidingData {
  std::function<double(double theta)> u0, v0, m0;  // on v = 0
  std::function<double(double v)> u1, v1, m1;      // on theta = 0
};

struct CollidingResult {
  GridFunction U, V, M;
  EvolveReport report;
  double v_constraint_max = 0.0;  // reported, never imposed
};

CollidingResult solve_colliding(const CollidingData& data, Interval theta,
                                int n_theta, Interval v, int n_v,
                                const EvolveOptions& opt = {});

struct ConstraintMonitorReport {
  std::vector<double> max_abs_by_v;
  /// max over columns and levels of |F(v) - F(0) exp(int_0^v U_v dv)|
  double max_defect = 0.0;
};

ConstraintMonitorReport monitor_constraint(const FieldSet& fields);

struct LinearizationProfile {
  std::function<double(double theta, double eta)> vhat_v0;
  std::function<double(double eta, double v)> vhat_theta0;
};

struct LinearizationReport {
  std::vector<double> epsilons;
  std::vector<double> defect;           // max|V_full - eps V_lin|
  std::vector<double> defect_rescaled;  // max|V_full/eps - V_lin|
  std::vector<double> u_over_eps2;      // max|U| / eps^2
  double defect_slope = 0.0;
  double defect_rescaled_slope = 0.0;
};

/// Runs evolve with data (U,V,M,Y) = (0, eps Vhat, -eps Vhat, 0) and compares
/// against the parabolic equation V_thetav = V_etaeta / 2 solved with the
/// same discrete arithmetic.
LinearizationReport linearization_check(const LinearizationProfile& profile,
                                        const Grid3& grid,
                                        std::span<const double> epsilons,
                                        const EvolveOptions& opt = {});

}  // namespace gwd
