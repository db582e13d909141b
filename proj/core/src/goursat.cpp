#include "gwd/goursat.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "gwd/error.hpp"

namespace gwd {

namespace {

// Node theta-derivative of one theta-line.
void theta_gradient(const std::vector<double>& a, std::vector<double>& out,
                    int n, double h, BoundaryMode mode) {
  if (mode == BoundaryMode::Periodic) {
    for (int i = 0; i < n; ++i) {
      const int ip = (i + 1) % n;
      const int im = (i + n - 1) % n;
      out[i] = (a[ip] - a[im]) / (2.0 * h);
    }
    return;
  }
  out[0] = (-3.0 * a[0] + 4.0 * a[1] - a[2]) / (2.0 * h);
  for (int i = 1; i < n - 1; ++i) out[i] = (a[i + 1] - a[i - 1]) / (2.0 * h);
  out[n - 1] = (3.0 * a[n - 1] - 4.0 * a[n - 2] + a[n - 3]) / (2.0 * h);
}

}  // namespace

GoursatRun solve_goursat_scalar(const ScalarGoursatProblem& prob) {
  const Grid3& g = prob.grid;
  const int nt = g.n_theta;
  const int ne = g.n_eta;
  const int nv = g.n_v;
  const double h = g.d_theta;
  const double k = g.d_v;
  const bool periodic_theta = prob.theta_mode == BoundaryMode::Periodic;
  const bool eta_active = ne >= 3;
  const double period = periodic_theta ? nt * h : 0.0;

  if (nt < 3) throw ConfigError("goursat: need at least 3 theta points");
  if (periodic_theta && eta_active) {
    throw ConfigError("goursat: periodic theta with an eta direction is unsupported");
  }
  if (!periodic_theta && !prob.boundary_theta0) {
    throw ConfigError("goursat: missing theta-boundary data");
  }

  auto lam = [&](double v) { return prob.lambda ? prob.lambda(v) : 0.0; };
  auto nco = [&](double v) { return prob.n_coeff ? prob.n_coeff(v) : 0.0; };
  auto dco = [&](double v) { return prob.d_coeff ? prob.d_coeff(v) : 0.0; };

  // step-ratio restriction for the explicitly swept diffractive term
  if (eta_active) {
    double dmax = 0.0;
    for (int j = 0; j + 1 < nv; ++j) {
      dmax = std::max(dmax, std::abs(dco(g.v(j) + 0.5 * k)));
    }
    const double ratio = k * dmax / (g.d_eta * g.d_eta);
    if (ratio > prob.stability_limit) {
      throw ConfigError("goursat: step ratio k*|D|/h_eta^2 = " +
                        std::to_string(ratio) + " exceeds limit " +
                        std::to_string(prob.stability_limit));
    }
  }

  GoursatRun run;
  run.a = GridFunction(g);
  GridFunction& a = run.a;

  for (int l = 0; l < ne; ++l) {
    for (int i = 0; i < nt; ++i) {
      a(i, l, 0) = prob.initial_v0(g.theta(i), g.eta(l));
    }
  }

  const int plane = nt * ne;
  std::vector<double> cur(plane), prev(plane), next(plane);
  std::vector<double> grad0(plane), grad1(plane);  // node a_theta on both levels
  std::vector<double> dee0(plane), dee1(plane);    // node a_etaeta on both levels
  std::vector<double> flux0(plane), flux1(plane);  // node transport flux
  std::vector<double> gcell(plane);                // per-cell RHS (cells 0..nt-2 or nt-1)
  std::vector<double> line(nt), dline(nt), mlev(nt), col(ne), dcol(ne), dcol2(ne);

  auto node_quantities = [&](const std::vector<double>& lev, double v_mid,
                             std::vector<double>& grad, std::vector<double>& dee,
                             std::vector<double>& flux) {
    const double lm = lam(v_mid);
    const double nm = nco(v_mid);
    for (int l = 0; l < ne; ++l) {
      const double* row = lev.data() + l * nt;
      for (int i = 0; i < nt; ++i) line[i] = row[i];
      theta_gradient(line, dline, nt, h, prob.theta_mode);
      for (int i = 0; i < nt; ++i) grad[l * nt + i] = dline[i];
      // transport flux at nodes, coefficients frozen at the v midpoint
      for (int i = 0; i < nt; ++i) {
        flux[l * nt + i] = lm * row[i] * dline[i] + nm * row[i];
      }
    }
    if (eta_active) {
      for (int i = 0; i < nt; ++i) {
        for (int l = 0; l < ne; ++l) col[l] = lev[l * nt + i];
        diff_line(col, dcol2, g.d_eta, 2, prob.eta_mode);
        for (int l = 0; l < ne; ++l) dee[l * nt + i] = dcol2[l];
      }
    } else {
      std::fill(dee.begin(), dee.end(), 0.0);
    }
  };

  for (int j = 0; j + 1 < nv; ++j) {
    const double v_mid = g.v(j) + 0.5 * k;
    const double v_new = g.v(j + 1);
    const double lm = lam(v_mid);
    const double dm = dco(v_mid);
    if (!std::isfinite(lm) || !std::isfinite(nco(v_mid)) || !std::isfinite(dm)) {
      throw SolverFailure(SolverFailure::Kind::NonFinite,
                          "non-finite coefficient at v midpoint", g.theta(0),
                          g.eta(0), v_mid);
    }

    for (int l = 0; l < ne; ++l)
      for (int i = 0; i < nt; ++i) cur[l * nt + i] = a(i, l, j);

    // seed the new level and impose theta-boundary data
    next = cur;
    if (!periodic_theta) {
      for (int l = 0; l < ne; ++l) {
        next[l * nt + 0] = prob.boundary_theta0(g.eta(l), v_new);
      }
    }

    node_quantities(cur, v_mid, grad0, dee0, flux0);

    bool converged = false;
    int it = 0;
    for (; it < prob.max_iterations; ++it) {
      ++run.total_sweeps;
      prev = next;
      node_quantities(next, v_mid, grad1, dee1, flux1);

      const int ncell = periodic_theta ? nt : nt - 1;
      for (int l = 0; l < ne; ++l) {
        const int o = l * nt;
        for (int c = 0; c < ncell; ++c) {
          const int i = c;
          const int ip = periodic_theta ? (c + 1) % nt : c + 1;
          const double s0 = periodic_theta && ip == 0
                                ? (cur[o] - cur[o + i]) / h  // wrap cell slope
                                : (cur[o + ip] - cur[o + i]) / h;
          const double s1 = periodic_theta && ip == 0
                                ? (next[o] - next[o + i]) / h
                                : (next[o + ip] - next[o + i]) / h;
          double g0 = 0.5 * lm * s0 * s0 - (flux0[o + ip] - flux0[o + i]) / h -
                      0.5 * dm * 0.5 * (dee0[o + i] + dee0[o + ip]);
          double g1 = 0.5 * lm * s1 * s1 - (flux1[o + ip] - flux1[o + i]) / h -
                      0.5 * dm * 0.5 * (dee1[o + i] + dee1[o + ip]);
          if (prob.source) {
            g0 += 0.5 * (prob.source(g.theta(i), g.eta(l), g.v(j)) +
                         prob.source(g.theta(i) + h, g.eta(l), g.v(j)));
            g1 += 0.5 * (prob.source(g.theta(i), g.eta(l), v_new) +
                         prob.source(g.theta(i) + h, g.eta(l), v_new));
          }
          gcell[o + c] = 0.5 * (g0 + g1);
        }
        if (prob.mean_corrected) {
          // subtract Lambda/2 <a_theta^2>, the cell-midpoint average
          double msq = 0.0;
          for (int c = 0; c < ncell; ++c) {
            const int ip = periodic_theta ? (c + 1) % nt : c + 1;
            const double s0 = (cur[o + (periodic_theta && ip == 0 ? 0 : ip)] -
                               cur[o + c]) / h;
            const double s1 = (next[o + (periodic_theta && ip == 0 ? 0 : ip)] -
                               next[o + c]) / h;
            msq += 0.5 * (s0 * s0 + s1 * s1);
          }
          msq /= ncell;
          for (int c = 0; c < ncell; ++c) gcell[o + c] -= 0.5 * lm * msq;
        }
      }

      double change = 0.0;
      if (periodic_theta) {
        for (int l = 0; l < ne; ++l) {
          const int o = l * nt;
          // exact solvability: remove the residual cell mean
          double gm = 0.0;
          for (int c = 0; c < nt; ++c) gm += gcell[o + c];
          gm /= nt;
          // prefix-march the level v-derivative, then pin the level mean to 0
          double b = 0.0;
          double bsum = 0.0;
          mlev[0] = 0.0;
          for (int c = 0; c + 1 < nt; ++c) {
            b += h * (gcell[o + c] - gm);
            mlev[c + 1] = b;
            bsum += b;
          }
          double asum = 0.0;
          for (int i = 0; i < nt; ++i) asum += cur[o + i];
          const double m0 = -(asum / nt) / k - bsum / nt;
          for (int i = 0; i < nt; ++i) {
            const double val = cur[o + i] + k * (m0 + mlev[i]);
            change = std::max(change, std::abs(val - next[o + i]));
            next[o + i] = val;
          }
        }
      } else {
        for (int l = 0; l < ne; ++l) {
          const int o = l * nt;
          for (int i = 0; i + 1 < nt; ++i) {
            const double val = a(i + 1, l, j) + (next[o + i] - cur[o + i]) +
                               h * k * gcell[o + i];
            change = std::max(change, std::abs(val - next[o + i + 1]));
            next[o + i + 1] = val;
          }
        }
      }

      for (double x : next) {
        if (!std::isfinite(x)) {
          throw SolverFailure(SolverFailure::Kind::NonFinite,
                              "non-finite value while marching", g.theta(0),
                              g.eta(0), v_new);
        }
      }
      if (change <= prob.fixed_point_tol) {
        converged = true;
        ++it;
        break;
      }
    }
    run.max_level_iterations = std::max(run.max_level_iterations, it);
    if (!converged) {
      throw SolverFailure(SolverFailure::Kind::FixedPointDiverged,
                          "corner iteration did not converge at v = " +
                              std::to_string(v_new),
                          g.theta(0), g.eta(0), v_new);
    }

    // gradient blow-up check on the accepted level
    node_quantities(next, v_mid, grad1, dee1, flux1);
    for (int l = 0; l < ne; ++l) {
      for (int i = 0; i < nt; ++i) {
        if (std::abs(grad1[l * nt + i]) > prob.gradient_cap) {
          throw SolverFailure(SolverFailure::Kind::GradientBlowup,
                              "gradient blow-up at (theta, eta, v)",
                              g.theta(i), g.eta(l), v_new);
        }
      }
    }

    for (int l = 0; l < ne; ++l)
      for (int i = 0; i < nt; ++i) a(i, l, j + 1) = next[l * nt + i];
  }

  return run;
}

}  // namespace gwd
