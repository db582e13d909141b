#pragma once

/// @file goursat.hpp
/// Corner-marching scheme for scalar equations of the form
///
///   { a_v + (Lambda/2 a^2)_theta + N a }_theta + (D/2) a_etaeta
///       = (Lambda/2) a_theta^2  [- (Lambda/2) <a_theta^2> in periodic mode]
///       + source
///
/// on a characteristic (theta, v) grid, optionally extended in eta.
/// The cell update is
///   a(th+h, v+k) = a(th+h,v) + a(th,v+k) - a(th,v) + h*k*RHS(cell midpoint),
/// with fixed-point iteration on the nonlinear midpoint RHS. Midpoint values
/// are v-averages of the two levels; transport fluxes are node-face
/// differences so that periodic levels close exactly.

#include <functional>

#include "gwd/grid.hpp"

namespace gwd {

struct ScalarGoursatProblem {
  Grid3 grid;  // n_eta == 1 means no transverse direction

  // theta treated as periodic (no duplicated endpoint, zero-mean levels) or
  // as a Goursat direction with data on theta = theta0
  BoundaryMode theta_mode = BoundaryMode::OneSided;
  BoundaryMode eta_mode = BoundaryMode::OneSided;

  std::function<double(double)> lambda;   // Lambda(v)
  std::function<double(double)> n_coeff;  // N(v)
  std::function<double(double)> d_coeff;  // D(v)
  std::function<double(double, double, double)> source;  // optional

  std::function<double(double theta, double eta)> initial_v0;       // a(.,.,v0)
  std::function<double(double eta, double v)> boundary_theta0;      // a(theta0,.,.)

  bool mean_corrected = false;  // subtract Lambda/2 <a_theta^2> (periodic waveform)

  double fixed_point_tol = 1e-12;
  int max_iterations = 50;
  double gradient_cap = 1e6;
  double stability_limit = 0.5;  // bound on k*|D|/h_eta^2
};

struct GoursatRun {
  GridFunction a;
  int max_level_iterations = 0;
  long total_sweeps = 0;
};

GoursatRun solve_goursat_scalar(const ScalarGoursatProblem& prob);

}  // namespace gwd
