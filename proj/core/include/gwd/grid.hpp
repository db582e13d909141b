#pragma once

/// @file grid.hpp
/// Uniform tensor-product grids in (theta, eta, v), grid functions stored
/// theta-fastest, second-order difference stencils, trapezoidal quadrature,
/// and convergence-order estimation.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gwd {

enum class Axis { Theta = 0, Eta = 1, V = 2 };

enum class BoundaryMode { OneSided, Periodic };

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct Grid3 {
  int n_theta = 2;
  int n_eta = 2;
  int n_v = 2;
  double theta0 = 0.0;
  double eta0 = 0.0;
  double v0 = 0.0;
  double d_theta = 1.0;
  double d_eta = 1.0;
  double d_v = 1.0;

  int count(Axis a) const {
    return a == Axis::Theta ? n_theta : (a == Axis::Eta ? n_eta : n_v);
  }
  double origin(Axis a) const {
    return a == Axis::Theta ? theta0 : (a == Axis::Eta ? eta0 : v0);
  }
  double spacing(Axis a) const {
    return a == Axis::Theta ? d_theta : (a == Axis::Eta ? d_eta : d_v);
  }

  double theta(int i) const { return theta0 + i * d_theta; }
  double eta(int j) const { return eta0 + j * d_eta; }
  double v(int k) const { return v0 + k * d_v; }

  std::size_t size() const {
    return static_cast<std::size_t>(n_theta) * n_eta * n_v;
  }
  // theta fastest, then eta, then v
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n_theta) *
               (static_cast<std::size_t>(j) +
                static_cast<std::size_t>(n_eta) * static_cast<std::size_t>(k));
  }

  bool same_layout(const Grid3& o) const;
};

/// Uniform grid over three closed intervals; spacing = (hi-lo)/(count-1).
Grid3 build_grid(Interval theta, Interval eta, Interval v, int n_theta,
                 int n_eta, int n_v);

class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const Grid3& grid, double fill = 0.0)
      : grid_(grid), values_(grid.size(), fill) {}

  const Grid3& grid() const { return grid_; }

  double& operator()(int i, int j, int k) {
    return values_[grid_.index(i, j, k)];
  }
  double operator()(int i, int j, int k) const {
    return values_[grid_.index(i, j, k)];
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  /// Throws ConfigError if any entry is NaN or infinite.
  void validate(const std::string& what) const;

  double max_abs() const;

 private:
  Grid3 grid_;
  std::vector<double> values_;
};

/// Second-order finite difference along one axis. Interior stencils are
/// centered; boundaries use one-sided second-order stencils (or wrap when
/// mode is Periodic, in which case the axis extent is treated as one period
/// with no duplicated endpoint). order is 1 or 2.
GridFunction diff(const GridFunction& f, Axis axis, int order,
                  BoundaryMode mode = BoundaryMode::OneSided);

/// Stencil weights applied to a single 1D line; used by diff and by callers
/// that differentiate plane slices in place.
void diff_line(std::span<const double> f, std::span<double> out, double h,
               int order, BoundaryMode mode);

/// Trapezoidal quadrature over the full grid box. For a Periodic axis the
/// weight is uniform (rectangle rule over one period).
double integrate(const GridFunction& f,
                 BoundaryMode theta_mode = BoundaryMode::OneSided,
                 BoundaryMode eta_mode = BoundaryMode::OneSided,
                 BoundaryMode v_mode = BoundaryMode::OneSided);

struct ConvergenceReport {
  std::vector<double> resolutions;
  std::vector<double> errors;
  double observed_order = 0.0;
};

/// Least-squares slope of log(error) against log(spacing). Requires at least
/// three pairs with distinct positive spacings. An exactly-zero error is
/// reported as an infinite-order sentinel.
ConvergenceReport estimate_order(std::span<const double> spacings,
                                 std::span<const double> errors);

}  // namespace gwd
