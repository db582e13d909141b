#include "gwd/go_solvers.hpp"

#include <cmath>

#include "gwd/error.hpp"

namespace gwd {

DiffractionResult diffraction_coefficient(std::span<const double> u_gradient,
                                          std::span<const double> y_gradient,
                                          double c0) {
  if (u_gradient.size() != y_gradient.size() || u_gradient.size() < 2) {
    throw ConfigError("diffraction_coefficient: gradient dimension mismatch");
  }
  if (!(c0 > 0.0)) throw ConfigError("diffraction_coefficient: c0 must be positive");
  const double c2 = c0 * c0;
  DiffractionResult r;
  double yy = 0.0, uy = 0.0;
  for (std::size_t i = 1; i < y_gradient.size(); ++i) {
    yy += y_gradient[i] * y_gradient[i];
    uy += u_gradient[i] * y_gradient[i];
  }
  r.d = y_gradient[0] * y_gradient[0] - c2 * yy;
  r.ray_invariance_defect = u_gradient[0] * y_gradient[0] - c2 * uy;
  return r;
}

TransportResult solve_transport(double a0,
                                const std::function<double(double)>& n,
                                double v_end, int steps, double amplitude_cap) {
  if (steps < 1) throw ConfigError("solve_transport: steps must be >= 1");
  const double k = v_end / steps;
  TransportResult out;
  out.v.reserve(steps + 1);
  out.amplitude.reserve(steps + 1);
  out.v.push_back(0.0);
  out.amplitude.push_back(a0);

  auto rate = [&](double v, double a) {
    const double nv = n(v);
    if (!std::isfinite(nv)) {
      throw SolverFailure(SolverFailure::Kind::NonFinite,
                          "non-finite transport coefficient N(v)", 0.0, 0.0, v);
    }
    return -nv * a;
  };

  double a = a0;
  for (int s = 0; s < steps; ++s) {
    const double v = s * k;
    const double k1 = rate(v, a);
    const double k2 = rate(v + 0.5 * k, a + 0.5 * k * k1);
    const double k3 = rate(v + 0.5 * k, a + 0.5 * k * k2);
    const double k4 = rate(v + k, a + k * k3);
    a += (k / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double vn = (s + 1) * k;
    out.v.push_back(vn);
    out.amplitude.push_back(a);
    if (std::abs(a) > amplitude_cap) {
      out.blew_up = true;
      out.blowup_v = vn;
      break;
    }
  }
  return out;
}

Grid3 hs_grid(Interval theta, int n_theta, Interval v, int n_v) {
  Grid3 g = build_grid(theta, Interval{0.0, 1.0}, v, n_theta, 2, n_v);
  g.n_eta = 1;
  return g;
}

Grid3 hs_periodic_grid(double period, int n_theta, Interval v, int n_v) {
  if (!(period > 0.0)) throw ConfigError("hs_periodic_grid: period must be positive");
  if (n_theta < 3) throw ConfigError("hs_periodic_grid: need >= 3 theta points");
  Grid3 g = build_grid(Interval{0.0, period}, Interval{0.0, 1.0}, v, 2, 2, n_v);
  g.n_theta = n_theta;
  g.d_theta = period / n_theta;
  g.n_eta = 1;
  return g;
}

namespace {

void validate_zero_d(const RayCoefficients& coeffs, const Grid3& g) {
  if (!coeffs.d) return;
  for (int j = 0; j < g.n_v; ++j) {
    if (coeffs.d(g.v(j)) != 0.0) {
      throw ConfigError("solve_hs: expects D = 0 (use solve_diffractive)");
    }
  }
}

}  // namespace

WaveState solve_hs(const HsData& data, const RayCoefficients& coeffs,
                   WaveformMode mode, const Grid3& grid,
                   const WaveOptions& opt) {
  if (grid.n_eta != 1) throw ConfigError("solve_hs: expects a (theta, v) grid");
  if (!data.at_v0) throw ConfigError("solve_hs: missing v = 0 data");
  validate_zero_d(coeffs, grid);

  ScalarGoursatProblem prob;
  prob.grid = grid;
  prob.lambda = coeffs.lambda;
  prob.n_coeff = coeffs.n;
  prob.source = opt.source;
  prob.initial_v0 = [&data](double th, double) { return data.at_v0(th); };
  prob.fixed_point_tol = opt.fixed_point_tol;
  prob.max_iterations = opt.max_iterations;
  prob.gradient_cap = opt.gradient_cap;
  prob.stability_limit = opt.stability_limit;

  WaveState state;
  if (mode == WaveformMode::Periodic) {
    prob.theta_mode = BoundaryMode::Periodic;
    prob.mean_corrected = true;
    const double period = grid.n_theta * grid.d_theta;
    double mean = 0.0, scale = 1.0;
    for (int i = 0; i < grid.n_theta; ++i) {
      const double x = data.at_v0(grid.theta(i));
      mean += x;
      scale = std::max(scale, std::abs(x));
    }
    mean /= grid.n_theta;
    if (std::abs(mean) > opt.mean_tol * scale) {
      throw ConfigError("solve_hs: non-zero-mean periodic data");
    }
    state.period = period;
    state.waveform_mode = WaveformMode::Periodic;
  } else {
    if (!data.at_theta0) throw ConfigError("solve_hs: missing theta = 0 data");
    prob.theta_mode = BoundaryMode::OneSided;
    prob.boundary_theta0 = [&data](double, double v) { return data.at_theta0(v); };
    state.waveform_mode = WaveformMode::Localized;
  }

  state.a = solve_goursat_scalar(prob).a;
  return state;
}

WaveState solve_diffractive(const DiffractiveData& data,
                            const RayCoefficients& coeffs, const Grid3& grid,
                            const WaveOptions& opt) {
  if (!data.at_v0 || !data.at_theta0) {
    throw ConfigError("solve_diffractive: data required on v = 0 and theta = 0 faces");
  }
  ScalarGoursatProblem prob;
  prob.grid = grid;
  prob.theta_mode = BoundaryMode::OneSided;
  prob.eta_mode = opt.eta_mode;
  prob.lambda = coeffs.lambda;
  prob.n_coeff = coeffs.n;
  prob.d_coeff = coeffs.d;
  prob.source = opt.source;
  prob.initial_v0 = data.at_v0;
  prob.boundary_theta0 = data.at_theta0;
  prob.fixed_point_tol = opt.fixed_point_tol;
  prob.max_iterations = opt.max_iterations;
  prob.gradient_cap = opt.gradient_cap;
  prob.stability_limit = opt.stability_limit;

  WaveState state;
  state.waveform_mode = WaveformMode::Localized;
  state.a = solve_goursat_scalar(prob).a;
  return state;
}

}  // namespace gwd
