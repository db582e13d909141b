#include "gwd/grid.hpp"

#include <cmath>
#include <limits>

#include "gwd/error.hpp"

namespace gwd {

bool Grid3::same_layout(const Grid3& o) const {
  return n_theta == o.n_theta && n_eta == o.n_eta && n_v == o.n_v &&
         theta0 == o.theta0 && eta0 == o.eta0 && v0 == o.v0 &&
         d_theta == o.d_theta && d_eta == o.d_eta && d_v == o.d_v;
}

Grid3 build_grid(Interval theta, Interval eta, Interval v, int n_theta,
                 int n_eta, int n_v) {
  auto check = [](const Interval& iv, int n, const char* name) {
    if (!(iv.hi > iv.lo)) {
      throw ConfigError(std::string("degenerate interval for ") + name);
    }
    if (n < 2) {
      throw ConfigError(std::string("count must be >= 2 for ") + name);
    }
  };
  check(theta, n_theta, "theta");
  check(eta, n_eta, "eta");
  check(v, n_v, "v");

  Grid3 g;
  g.n_theta = n_theta;
  g.n_eta = n_eta;
  g.n_v = n_v;
  g.theta0 = theta.lo;
  g.eta0 = eta.lo;
  g.v0 = v.lo;
  g.d_theta = (theta.hi - theta.lo) / (n_theta - 1);
  g.d_eta = (eta.hi - eta.lo) / (n_eta - 1);
  g.d_v = (v.hi - v.lo) / (n_v - 1);
  return g;
}

void GridFunction::validate(const std::string& what) const {
  for (double x : values_) {
    if (!std::isfinite(x)) {
      throw ConfigError("non-finite value in grid function: " + what);
    }
  }
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

void diff_line(std::span<const double> f, std::span<double> out, double h,
               int order, BoundaryMode mode) {
  const int n = static_cast<int>(f.size());
  if (order != 1 && order != 2) throw ConfigError("diff order must be 1 or 2");
  if (mode == BoundaryMode::Periodic) {
    if (n < 3) throw ConfigError("diff needs >= 3 points along axis");
    auto at = [&](int i) { return f[(i % n + n) % n]; };
    if (order == 1) {
      for (int i = 0; i < n; ++i) out[i] = (at(i + 1) - at(i - 1)) / (2.0 * h);
    } else {
      for (int i = 0; i < n; ++i) {
        out[i] = (at(i + 1) - 2.0 * f[i] + at(i - 1)) / (h * h);
      }
    }
    return;
  }
  if (order == 1) {
    if (n < 3) throw ConfigError("diff needs >= 3 points along axis");
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (int i = 1; i < n - 1; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  } else {
    if (n < 4) throw ConfigError("diff order 2 needs >= 4 points along axis");
    const double h2 = h * h;
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    for (int i = 1; i < n - 1; ++i) {
      out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    }
    out[n - 1] =
        (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
  }
}

GridFunction diff(const GridFunction& f, Axis axis, int order,
                  BoundaryMode mode) {
  const Grid3& g = f.grid();
  GridFunction out(g);
  const double h = g.spacing(axis);
  const int n = g.count(axis);

  std::vector<double> line(n), dline(n);
  auto run = [&](auto index_of) {
    for (int i = 0; i < n; ++i) line[i] = f.values()[index_of(i)];
    diff_line(line, dline, h, order, mode);
    for (int i = 0; i < n; ++i) out.values()[index_of(i)] = dline[i];
  };

  if (axis == Axis::Theta) {
    for (int k = 0; k < g.n_v; ++k)
      for (int j = 0; j < g.n_eta; ++j)
        run([&](int i) { return g.index(i, j, k); });
  } else if (axis == Axis::Eta) {
    for (int k = 0; k < g.n_v; ++k)
      for (int i = 0; i < g.n_theta; ++i)
        run([&](int j) { return g.index(i, j, k); });
  } else {
    for (int j = 0; j < g.n_eta; ++j)
      for (int i = 0; i < g.n_theta; ++i)
        run([&](int k) { return g.index(i, j, k); });
  }
  return out;
}

namespace {
double axis_weight(int i, int n, double h, BoundaryMode mode) {
  if (mode == BoundaryMode::Periodic) return h;
  return (i == 0 || i == n - 1) ? 0.5 * h : h;
}
}  // namespace

double integrate(const GridFunction& f, BoundaryMode theta_mode,
                 BoundaryMode eta_mode, BoundaryMode v_mode) {
  const Grid3& g = f.grid();
  double total = 0.0;
  for (int k = 0; k < g.n_v; ++k) {
    const double wv = axis_weight(k, g.n_v, g.d_v, v_mode);
    for (int j = 0; j < g.n_eta; ++j) {
      const double wjv = wv * axis_weight(j, g.n_eta, g.d_eta, eta_mode);
      for (int i = 0; i < g.n_theta; ++i) {
        total += wjv * axis_weight(i, g.n_theta, g.d_theta, theta_mode) *
                 f(i, j, k);
      }
    }
  }
  return total;
}

ConvergenceReport estimate_order(std::span<const double> spacings,
                                 std::span<const double> errors) {
  if (spacings.size() != errors.size()) {
    throw ConfigError("estimate_order: mismatched lengths");
  }
  if (spacings.size() < 3) {
    throw ConfigError("estimate_order: need at least 3 (spacing, error) pairs");
  }
  ConvergenceReport rep;
  rep.resolutions.assign(spacings.begin(), spacings.end());
  rep.errors.assign(errors.begin(), errors.end());

  bool any_zero = false;
  for (std::size_t i = 0; i < spacings.size(); ++i) {
    if (!(spacings[i] > 0.0)) {
      throw ConfigError("estimate_order: spacings must be positive");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (spacings[i] == spacings[j]) {
        throw ConfigError("estimate_order: spacings must be distinct");
      }
    }
    if (errors[i] < 0.0) {
      throw ConfigError("estimate_order: errors must be non-negative");
    }
    if (errors[i] == 0.0) any_zero = true;
  }
  if (any_zero) {
    rep.observed_order = std::numeric_limits<double>::infinity();
    return rep;
  }

  // least-squares slope of log(e) vs log(h)
  const std::size_t n = spacings.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(spacings[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.observed_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return rep;
}

}  // namespace gwd
