#pragma once

/// @file go_solvers.hpp
/// The geometrical-optics model hierarchy: linear transport along rays, the
/// parabolic (diffractive) approximation, and the Hunter-Saxton family on
/// characteristic (theta, v) grids.

#include <functional>
#include <span>
#include <vector>

#include "gwd/goursat.hpp"
#include "gwd/grid.hpp"

namespace gwd {

struct RayCoefficients {
  std::function<double(double)> n;       // transport coefficient N(v)
  std::function<double(double)> lambda;  // nonlinearity coefficient Lambda(v)
  std::function<double(double)> d;       // diffraction coefficient D(v)
};

inline RayCoefficients constant_coefficients(double lambda, double n, double d) {
  return RayCoefficients{[n](double) { return n; },
                         [lambda](double) { return lambda; },
                         [d](double) { return d; }};
}

struct DiffractionResult {
  double d = 0.0;                       // y_t^2 - c0^2 |grad y|^2
  double ray_invariance_defect = 0.0;   // y_v = u_t y_t - c0^2 grad u . grad y
};

/// Gradients are spacetime covectors (time component first, then d spatial
/// components); both must have the same dimension d+1.
DiffractionResult diffraction_coefficient(std::span<const double> u_gradient,
                                          std::span<const double> y_gradient,
                                          double c0);

struct TransportResult {
  std::vector<double> v;
  std::vector<double> amplitude;
  bool blew_up = false;
  double blowup_v = 0.0;
};

/// A_v + N(v) A = 0 by classical 4th-order one-step integration; the history
/// stops early (blew_up set) once |A| exceeds the cap.
TransportResult solve_transport(double a0,
                                const std::function<double(double)>& n,
                                double v_end, int steps,
                                double amplitude_cap = 1e6);

enum class WaveformMode { Periodic, Localized };

struct WaveState {
  GridFunction a;
  WaveformMode waveform_mode = WaveformMode::Localized;
  double period = 0.0;  // declared theta-period in periodic mode
};

struct WaveOptions {
  double fixed_point_tol = 1e-12;
  int max_iterations = 50;
  double gradient_cap = 1e6;
  double stability_limit = 0.5;
  double mean_tol = 1e-10;  // zero-mean validation of periodic data
  BoundaryMode eta_mode = BoundaryMode::OneSided;
  std::function<double(double, double, double)> source;  // manufactured forcing
};

/// (theta, v) grid with a degenerate eta direction.
Grid3 hs_grid(Interval theta, int n_theta, Interval v, int n_v);
/// Periodic theta covering [0, period) with no duplicated endpoint.
Grid3 hs_periodic_grid(double period, int n_theta, Interval v, int n_v);

struct HsData {
  std::function<double(double theta)> at_v0;
  std::function<double(double v)> at_theta0;  // localized mode only
};

WaveState solve_hs(const HsData& data, const RayCoefficients& coeffs,
                   WaveformMode mode, const Grid3& grid,
                   const WaveOptions& opt = {});

struct DiffractiveData {
  std::function<double(double theta, double eta)> at_v0;
  std::function<double(double eta, double v)> at_theta0;
};

WaveState solve_diffractive(const DiffractiveData& data,
                            const RayCoefficients& coeffs, const Grid3& grid,
                            const WaveOptions& opt = {});

}  // namespace gwd
