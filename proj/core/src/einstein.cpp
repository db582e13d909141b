#include "gwd/einstein.hpp"

#include <algorithm>
#include <cmath>

#include "gwd/error.hpp"
#include "gwd/go_solvers.hpp"
#include "gwd/goursat.hpp"

namespace gwd {

void FieldSet::validate() const {
  const Grid3& g = U.grid();
  if (!V.grid().same_layout(g) || !M.grid().same_layout(g) ||
      !Y.grid().same_layout(g) || (T && !T->grid().same_layout(g))) {
    throw ConfigError("FieldSet: fields must share one grid");
  }
  U.validate("U");
  V.validate("V");
  M.validate("M");
  Y.validate("Y");
  if (T) T->validate("T");
}

GridFunction apply_D_eta(const FieldSet& fields, const GridFunction& f,
                         BoundaryMode eta_mode) {
  const Grid3& g = fields.grid();
  if (!f.grid().same_layout(g)) throw ConfigError("apply_D_eta: grid mismatch");
  GridFunction f_th = diff(f, Axis::Theta, 1);
  GridFunction f_et = g.n_eta >= 3 ? diff(f, Axis::Eta, 1, eta_mode)
                                   : GridFunction(g, 0.0);
  GridFunction out(g);
  for (int k = 0; k < g.n_v; ++k)
    for (int j = 0; j < g.n_eta; ++j)
      for (int i = 0; i < g.n_theta; ++i) {
        out(i, j, k) = std::exp(fields.U(i, j, k)) *
                       (f_et(i, j, k) + fields.Y(i, j, k) * f_th(i, j, k));
      }
  return out;
}

AuxFields make_aux_fields(const FieldSet& fields, BoundaryMode eta_mode) {
  const Grid3& g = fields.grid();
  GridFunction sum_uv(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    sum_uv.values()[n] = fields.U.values()[n] + fields.V.values()[n];
  }
  GridFunction y_th = diff(fields.Y, Axis::Theta, 1);
  AuxFields aux{apply_D_eta(fields, fields.M, eta_mode),
                apply_D_eta(fields, sum_uv, eta_mode)};
  for (int k = 0; k < g.n_v; ++k)
    for (int j = 0; j < g.n_eta; ++j)
      for (int i = 0; i < g.n_theta; ++i) {
        aux.phi(i, j, k) -= std::exp(fields.U(i, j, k)) * y_th(i, j, k);
      }
  return aux;
}

ConstraintField constraint_residual(const FieldSet& fields) {
  fields.validate();
  const Grid3& g = fields.grid();
  GridFunction u_th = diff(fields.U, Axis::Theta, 1);
  GridFunction u_thth = diff(fields.U, Axis::Theta, 2);
  GridFunction v_th = diff(fields.V, Axis::Theta, 1);
  GridFunction m_th = diff(fields.M, Axis::Theta, 1);

  ConstraintField cf{GridFunction(g), {}};
  cf.max_abs_by_v.assign(g.n_v, 0.0);
  for (int k = 0; k < g.n_v; ++k) {
    double mx = 0.0;
    for (int j = 0; j < g.n_eta; ++j)
      for (int i = 0; i < g.n_theta; ++i) {
        const double f =
            u_thth(i, j, k) -
            0.5 * (u_th(i, j, k) * u_th(i, j, k) + v_th(i, j, k) * v_th(i, j, k)) +
            u_th(i, j, k) * m_th(i, j, k);
        cf.F(i, j, k) = f;
        mx = std::max(mx, std::abs(f));
      }
    cf.max_abs_by_v[k] = mx;
  }
  return cf;
}

std::vector<double> integrate_y_column(
    const std::function<double(double)>& c1,
    const std::function<double(double)>& c0,
    const std::function<double(double)>& r, double y_at0, double dy_at0,
    double theta0, double h, int n) {
  std::vector<double> out(n);
  double y = y_at0;
  double z = dy_at0;
  out[0] = y;
  auto f = [&](double th, double yy, double zz, double& dy, double& dz) {
    dy = zz;
    dz = c1(th) * zz + c0(th) * yy + r(th);
  };
  for (int i = 0; i + 1 < n; ++i) {
    const double th = theta0 + i * h;
    double k1y, k1z, k2y, k2z, k3y, k3z, k4y, k4z;
    f(th, y, z, k1y, k1z);
    f(th + 0.5 * h, y + 0.5 * h * k1y, z + 0.5 * h * k1z, k2y, k2z);
    f(th + 0.5 * h, y + 0.5 * h * k2y, z + 0.5 * h * k2z, k3y, k3z);
    f(th + h, y + h * k3y, z + h * k3z, k4y, k4z);
    y += (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    z += (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    if (!std::isfinite(y) || !std::isfinite(z)) {
      throw SolverFailure(SolverFailure::Kind::NonFinite,
                          "non-finite Y integration", th, 0.0, 0.0);
    }
    out[i + 1] = y;
  }
  return out;
}

namespace {

/// Stencil work on one (theta, eta) level plane, stored row-major with theta
/// fastest: idx = l * nt + i.
struct PlaneOps {
  int nt = 0, ne = 0;
  double h_theta = 1.0, h_eta = 1.0;
  BoundaryMode eta_mode = BoundaryMode::OneSided;
  bool eta_active = false;

  void d_theta(const std::vector<double>& f, std::vector<double>& out) const {
    for (int l = 0; l < ne; ++l) {
      const double* a = f.data() + l * nt;
      double* o = out.data() + l * nt;
      const double h = h_theta;
      o[0] = (-3.0 * a[0] + 4.0 * a[1] - a[2]) / (2.0 * h);
      for (int i = 1; i < nt - 1; ++i) o[i] = (a[i + 1] - a[i - 1]) / (2.0 * h);
      o[nt - 1] = (3.0 * a[nt - 1] - 4.0 * a[nt - 2] + a[nt - 3]) / (2.0 * h);
    }
  }

  void d_theta2(const std::vector<double>& f, std::vector<double>& out) const {
    const double h2 = h_theta * h_theta;
    for (int l = 0; l < ne; ++l) {
      const double* a = f.data() + l * nt;
      double* o = out.data() + l * nt;
      o[0] = (2.0 * a[0] - 5.0 * a[1] + 4.0 * a[2] - a[3]) / h2;
      for (int i = 1; i < nt - 1; ++i) o[i] = (a[i + 1] - 2.0 * a[i] + a[i - 1]) / h2;
      o[nt - 1] =
          (2.0 * a[nt - 1] - 5.0 * a[nt - 2] + 4.0 * a[nt - 3] - a[nt - 4]) / h2;
    }
  }

  void d_eta(const std::vector<double>& f, std::vector<double>& out) const {
    if (!eta_active) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    const double h = h_eta;
    for (int i = 0; i < nt; ++i) {
      auto at = [&](int l) { return f[l * nt + i]; };
      if (eta_mode == BoundaryMode::Periodic) {
        for (int l = 0; l < ne; ++l) {
          out[l * nt + i] =
              (at((l + 1) % ne) - at((l + ne - 1) % ne)) / (2.0 * h);
        }
      } else {
        out[0 * nt + i] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
        for (int l = 1; l < ne - 1; ++l) {
          out[l * nt + i] = (at(l + 1) - at(l - 1)) / (2.0 * h);
        }
        out[(ne - 1) * nt + i] =
            (3.0 * at(ne - 1) - 4.0 * at(ne - 2) + at(ne - 3)) / (2.0 * h);
      }
    }
  }

  void d_eta2(const std::vector<double>& f, std::vector<double>& out) const {
    if (!eta_active) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    const double h2 = h_eta * h_eta;
    for (int i = 0; i < nt; ++i) {
      auto at = [&](int l) { return f[l * nt + i]; };
      if (eta_mode == BoundaryMode::Periodic) {
        for (int l = 0; l < ne; ++l) {
          out[l * nt + i] =
              (at((l + 1) % ne) - 2.0 * at(l) + at((l + ne - 1) % ne)) / h2;
        }
      } else {
        out[0 * nt + i] =
            (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / h2;
        for (int l = 1; l < ne - 1; ++l) {
          out[l * nt + i] = (at(l + 1) - 2.0 * at(l) + at(l - 1)) / h2;
        }
        out[(ne - 1) * nt + i] = (2.0 * at(ne - 1) - 5.0 * at(ne - 2) +
                                  4.0 * at(ne - 3) - at(ne - 4)) / h2;
      }
    }
  }
};

struct LevelScratch {
  std::vector<double> p, q;  // U+V, U+V+M
  std::vector<double> u_th, u_et, m_th, m_et, m_thth, m_etet, m_thet;
  std::vector<double> p_th, p_et, p_thth, p_etet, p_thet;
  std::vector<double> y_th, y_et, y_thth, y_thet;
  std::vector<double> rq, rp, ru;      // node RHS of the marched equations
  std::vector<double> sq, sp, su, sy;  // per-level source samples
  void resize(std::size_t n) {
    for (auto* f : {&p, &q, &u_th, &u_et, &m_th, &m_et, &m_thth, &m_etet,
                    &m_thet, &p_th, &p_et, &p_thth, &p_etet, &p_thet, &y_th,
                    &y_et, &y_thth, &y_thet, &rq, &rp, &ru, &sq, &sp, &su,
                    &sy}) {
      f->assign(n, 0.0);
    }
  }
};

// Manufactured sources sampled once per level; they never change across the
// corner iteration.
void fill_sources(const Grid3& g, double v_level, const EvolveOptions& opt,
                  LevelScratch& s) {
  auto fill = [&](const std::function<double(double, double, double)>& fn,
                  std::vector<double>& out) {
    if (!fn) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    for (int l = 0; l < g.n_eta; ++l)
      for (int i = 0; i < g.n_theta; ++i) {
        out[static_cast<std::size_t>(l) * g.n_theta + i] =
            fn(g.theta(i), g.eta(l), v_level);
      }
  };
  fill(opt.source_q, s.sq);
  fill(opt.source_p, s.sp);
  fill(opt.source_u, s.su);
  fill(opt.source_y, s.sy);
}

// Node RHS of the marched combinations at one level.
void level_rhs(const PlaneOps& ops, const std::vector<double>& u,
               const std::vector<double>& vf, const std::vector<double>& m,
               const std::vector<double>& y, LevelScratch& s) {
  const std::size_t n = u.size();
  for (std::size_t idx = 0; idx < n; ++idx) {
    s.p[idx] = u[idx] + vf[idx];
    s.q[idx] = s.p[idx] + m[idx];
  }

  if (!ops.eta_active) {
    for (std::size_t idx = 0; idx < n; ++idx) {
      s.rq[idx] = s.sq[idx];
      s.rp[idx] = s.sp[idx];
      s.ru[idx] = s.su[idx];
    }
    return;
  }

  ops.d_theta(u, s.u_th);
  ops.d_eta(u, s.u_et);
  ops.d_theta(m, s.m_th);
  ops.d_eta(m, s.m_et);
  ops.d_theta2(m, s.m_thth);
  ops.d_eta2(m, s.m_etet);
  ops.d_eta(s.m_th, s.m_thet);
  ops.d_theta(s.p, s.p_th);
  ops.d_eta(s.p, s.p_et);
  ops.d_theta2(s.p, s.p_thth);
  ops.d_eta2(s.p, s.p_etet);
  ops.d_eta(s.p_th, s.p_thet);
  ops.d_theta(y, s.y_th);
  ops.d_eta(y, s.y_et);
  ops.d_theta2(y, s.y_thth);
  ops.d_eta(s.y_th, s.y_thet);

  for (int l = 0; l < ops.ne; ++l)
    for (int i = 0; i < ops.nt; ++i) {
      const std::size_t idx = static_cast<std::size_t>(l) * ops.nt + i;
      const double eu = std::exp(u[idx]);
      const double emq = std::exp(-s.q[idx]);
      const double yv = y[idx];
      const double fb = s.m_et[idx] + yv * s.m_th[idx] - s.y_th[idx];
      const double pb = s.p_et[idx] + yv * s.p_th[idx];
      const double phi = eu * fb;
      const double psi = eu * pb;
      const double phi_et =
          eu * (s.u_et[idx] * fb + s.m_etet[idx] + s.y_et[idx] * s.m_th[idx] +
                yv * s.m_thet[idx] - s.y_thet[idx]);
      const double phi_th =
          eu * (s.u_th[idx] * fb + s.m_thet[idx] + s.y_th[idx] * s.m_th[idx] +
                yv * s.m_thth[idx] - s.y_thth[idx]);
      const double psi_et =
          eu * (s.u_et[idx] * pb + s.p_etet[idx] + s.y_et[idx] * s.p_th[idx] +
                yv * s.p_thet[idx]);
      const double psi_th =
          eu * (s.u_th[idx] * pb + s.p_thet[idx] + s.y_th[idx] * s.p_th[idx] +
                yv * s.p_thth[idx]);
      const double dphi = eu * (phi_et + yv * phi_th);
      const double dpsi = eu * (psi_et + yv * psi_th);
      s.rq[idx] = 0.5 * emq * (-0.5 * phi * phi - phi * psi) + s.sq[idx];
      s.rp[idx] = 0.5 * emq * (dpsi - phi * psi - psi * psi) + s.sp[idx];
      s.ru[idx] = 0.5 * emq *
                      (dphi + dpsi - 0.5 * phi * phi - phi * psi - psi * psi) +
                  s.su[idx];
    }
}

// Solve the Y ODE on one level plane from stencil coefficients.
void y_solve_plane(const PlaneOps& ops, const Grid3& g, double v_level,
                   const std::function<double(double, double)>& y0_fn,
                   const std::function<double(double, double)>& y1_fn,
                   const std::vector<double>& sy,
                   const std::vector<double>& u, const std::vector<double>& vf,
                   const std::vector<double>& m, std::vector<double>& y_out) {
  const int nt = ops.nt;
  const int ne = ops.ne;
  const double h = g.d_theta;
  static thread_local std::vector<double> u_th, v_th, m_th, vm, vm_th, vm_thth,
      q, q_th, q_theta_eta, m_et, p, p_et;
  const std::size_t n = u.size();
  for (auto* f : {&u_th, &v_th, &m_th, &vm, &vm_th, &vm_thth, &q, &q_th,
                  &q_theta_eta, &m_et, &p, &p_et}) {
    f->assign(n, 0.0);
  }
  for (std::size_t idx = 0; idx < n; ++idx) {
    vm[idx] = vf[idx] + m[idx];
    p[idx] = u[idx] + vf[idx];
    q[idx] = p[idx] + m[idx];
  }
  ops.d_theta(u, u_th);
  ops.d_theta(vf, v_th);
  ops.d_theta(m, m_th);
  ops.d_theta(vm, vm_th);
  ops.d_theta2(vm, vm_thth);
  if (ops.eta_active) {
    ops.d_theta(q, q_th);
    ops.d_eta(q_th, q_theta_eta);
    ops.d_eta(m, m_et);
    ops.d_eta(p, p_et);
  }

  for (int l = 0; l < ne; ++l) {
    const double eta = g.eta(l);
    const double y_at0 = y0_fn ? y0_fn(eta, v_level) : 0.0;
    const double dy_at0 = y1_fn ? y1_fn(eta, v_level) : 0.0;
    const std::size_t o = static_cast<std::size_t>(l) * nt;

    auto c1_at = [&](int i) { return vm_th[o + i]; };
    auto c0_at = [&](int i) {
      return vm_thth[o + i] - 0.5 * u_th[o + i] * u_th[o + i] +
             u_th[o + i] * v_th[o + i] + 0.5 * v_th[o + i] * v_th[o + i];
    };
    auto r_at = [&](int i) {
      return q_theta_eta[o + i] + m_et[o + i] * u_th[o + i] -
             p_et[o + i] * v_th[o + i] + sy[o + i];
    };

    double y = y_at0, z = dy_at0;
    y_out[o + 0] = y;
    for (int i = 0; i + 1 < nt; ++i) {
      const double c1a = c1_at(i), c1m = 0.5 * (c1_at(i) + c1_at(i + 1)),
                   c1b = c1_at(i + 1);
      const double c0a = c0_at(i), c0m = 0.5 * (c0_at(i) + c0_at(i + 1)),
                   c0b = c0_at(i + 1);
      const double ra = r_at(i), rm = 0.5 * (r_at(i) + r_at(i + 1)),
                   rb = r_at(i + 1);
      const double k1y = z, k1z = c1a * z + c0a * y + ra;
      const double y2 = y + 0.5 * h * k1y, z2 = z + 0.5 * h * k1z;
      const double k2y = z2, k2z = c1m * z2 + c0m * y2 + rm;
      const double y3 = y + 0.5 * h * k2y, z3 = z + 0.5 * h * k2z;
      const double k3y = z3, k3z = c1m * z3 + c0m * y3 + rm;
      const double y4 = y + h * k3y, z4 = z + h * k3z;
      const double k4y = z4, k4z = c1b * z4 + c0b * y4 + rb;
      y += (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
      z += (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
      if (!std::isfinite(y) || !std::isfinite(z)) {
        throw SolverFailure(SolverFailure::Kind::NonFinite,
                            "non-finite Y coefficients", g.theta(i), eta,
                            v_level);
      }
      y_out[o + i + 1] = y;
    }
  }
}

void plane_constraint_max(const PlaneOps& ops, const std::vector<double>& u,
                          const std::vector<double>& vf,
                          const std::vector<double>& m, double& max_f) {
  static thread_local std::vector<double> u_th, u_thth, v_th, m_th;
  const std::size_t n = u.size();
  for (auto* f : {&u_th, &u_thth, &v_th, &m_th}) f->assign(n, 0.0);
  ops.d_theta(u, u_th);
  ops.d_theta2(u, u_thth);
  ops.d_theta(vf, v_th);
  ops.d_theta(m, m_th);
  max_f = 0.0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    const double f = u_thth[idx] -
                     0.5 * (u_th[idx] * u_th[idx] + v_th[idx] * v_th[idx]) +
                     u_th[idx] * m_th[idx];
    max_f = std::max(max_f, std::abs(f));
  }
}

FieldSet march_einstein(const BoundaryData& data, const Grid3& g,
                        const EvolveOptions& opt, EvolveReport* report) {
  if (g.n_theta < 4) throw ConfigError("evolve: need at least 4 theta points");
  if (g.n_v < 2) throw ConfigError("evolve: need at least 2 v levels");
  if (!data.u0 || !data.v0 || !data.m0 || !data.u1 || !data.v1 || !data.m1) {
    throw ConfigError("evolve: incomplete boundary data");
  }

  PlaneOps ops;
  ops.nt = g.n_theta;
  ops.ne = g.n_eta;
  ops.h_theta = g.d_theta;
  ops.h_eta = g.d_eta;
  ops.eta_mode = opt.eta_mode;
  ops.eta_active = g.n_eta >= 3;

  EvolveReport local_report;
  EvolveReport& rep = report ? *report : local_report;
  rep = EvolveReport{};

  const int nt = g.n_theta;
  const int ne = g.n_eta;
  const std::size_t plane = static_cast<std::size_t>(nt) * ne;
  const double h = g.d_theta;
  const double k = g.d_v;

  FieldSet out{GridFunction(g), GridFunction(g), GridFunction(g),
               GridFunction(g), std::nullopt};

  std::vector<double> u0(plane), v0(plane), m0(plane), y0p(plane);
  std::vector<double> u1(plane), v1(plane), m1(plane), y1p(plane);
  std::vector<double> q0(plane), p0(plane), q1(plane), p1(plane);
  LevelScratch s0, s1;
  s0.resize(plane);
  s1.resize(plane);

  // level 0 from data
  for (int l = 0; l < ne; ++l)
    for (int i = 0; i < nt; ++i) {
      const double th = g.theta(i), et = g.eta(l);
      const std::size_t idx = static_cast<std::size_t>(l) * nt + i;
      u0[idx] = data.u0(th, et);
      v0[idx] = data.v0(th, et);
      m0[idx] = data.m0(th, et);
    }

  // corner compatibility between the two data faces
  double corner_defect = 0.0;
  for (int l = 0; l < ne; ++l) {
    const double et = g.eta(l);
    corner_defect = std::max(
        {corner_defect, std::abs(data.u0(g.theta0, et) - data.u1(et, g.v0)),
         std::abs(data.v0(g.theta0, et) - data.v1(et, g.v0)),
         std::abs(data.m0(g.theta0, et) - data.m1(et, g.v0))});
  }
  if (corner_defect > opt.corner_tol) {
    throw ConfigError("evolve: corner compatibility defect " +
                      std::to_string(corner_defect) + " exceeds tolerance");
  }

  // theta-constraint on the v = 0 data
  double f0_max = 0.0;
  plane_constraint_max(ops, u0, v0, m0, f0_max);
  if (opt.constraint_check != ConstraintPolicy::Off &&
      f0_max > opt.constraint_tol) {
    const std::string msg = "v = 0 data violates the theta-constraint: max|F| = " +
                            std::to_string(f0_max);
    if (opt.constraint_check == ConstraintPolicy::Error) throw ConfigError(msg);
    rep.warnings.push_back(msg);
    log_line(LogLevel::Info, msg);
  }
  rep.constraint_max_by_v.push_back(f0_max);

  fill_sources(g, g.v0, opt, s0);
  y_solve_plane(ops, g, g.v0, data.y0, data.y1, s0.sy, u0, v0, m0, y0p);

  auto store_level = [&](int j, const std::vector<double>& u,
                         const std::vector<double>& vf,
                         const std::vector<double>& m,
                         const std::vector<double>& y) {
    for (int l = 0; l < ne; ++l)
      for (int i = 0; i < nt; ++i) {
        const std::size_t idx = static_cast<std::size_t>(l) * nt + i;
        out.U(i, l, j) = u[idx];
        out.V(i, l, j) = vf[idx];
        out.M(i, l, j) = m[idx];
        out.Y(i, l, j) = y[idx];
      }
  };
  store_level(0, u0, v0, m0, y0p);

  for (int j = 0; j + 1 < g.n_v; ++j) {
    const double v_new = g.v(j + 1);
    for (std::size_t idx = 0; idx < plane; ++idx) {
      p0[idx] = u0[idx] + v0[idx];
      q0[idx] = p0[idx] + m0[idx];
    }
    level_rhs(ops, u0, v0, m0, y0p, s0);
    fill_sources(g, v_new, opt, s1);

    bool converged = false;
    const double dampings[2] = {opt.damping, 0.5};
    const int n_phases = (opt.damping == 0.5) ? 1 : 2;
    for (int phase = 0; phase < n_phases && !converged; ++phase) {
      const double damp = dampings[phase];
      if (phase > 0) rep.used_damping = true;

      // seed the new level and impose theta = 0 boundary data
      u1 = u0;
      v1 = v0;
      m1 = m0;
      for (int l = 0; l < ne; ++l) {
        const double et = g.eta(l);
        const std::size_t idx = static_cast<std::size_t>(l) * nt;
        u1[idx] = data.u1(et, v_new);
        v1[idx] = data.v1(et, v_new);
        m1[idx] = data.m1(et, v_new);
      }
      for (std::size_t idx = 0; idx < plane; ++idx) {
        p1[idx] = u1[idx] + v1[idx];
        q1[idx] = p1[idx] + m1[idx];
      }

      for (int it = 0; it < opt.max_iterations; ++it) {
        ++rep.total_sweeps;
        y_solve_plane(ops, g, v_new, data.y0, data.y1, s1.sy, u1, v1, m1, y1p);
        level_rhs(ops, u1, v1, m1, y1p, s1);

        double change = 0.0;
        for (int l = 0; l < ne; ++l) {
          const std::size_t o = static_cast<std::size_t>(l) * nt;
          for (int i = 0; i + 1 < nt; ++i) {
            const std::size_t a = o + i, b = o + i + 1;
            const double u_th =
                (u0[b] + u1[b] - u0[a] - u1[a]) / (2.0 * h);
            const double u_v = (u1[a] + u1[b] - u0[a] - u0[b]) / (2.0 * k);
            const double p_th =
                (p0[b] + p1[b] - p0[a] - p1[a]) / (2.0 * h);
            const double p_v = (p1[a] + p1[b] - p0[a] - p0[b]) / (2.0 * k);

            const double gq = 0.5 * p_th * p_v +
                              0.25 * (s0.rq[a] + s0.rq[b] + s1.rq[a] + s1.rq[b]);
            const double gp = 0.5 * u_th * p_v + 0.5 * u_v * p_th +
                              0.25 * (s0.rp[a] + s0.rp[b] + s1.rp[a] + s1.rp[b]);
            const double gu = u_th * u_v +
                              0.25 * (s0.ru[a] + s0.ru[b] + s1.ru[a] + s1.ru[b]);

            const double new_q = q0[b] + (q1[a] - q0[a]) + h * k * gq;
            const double new_p = p0[b] + (p1[a] - p0[a]) + h * k * gp;
            const double new_u = u0[b] + (u1[a] - u0[a]) + h * k * gu;

            const double val_q = damp * new_q + (1.0 - damp) * q1[b];
            const double val_p = damp * new_p + (1.0 - damp) * p1[b];
            const double val_u = damp * new_u + (1.0 - damp) * u1[b];

            change = std::max({change, std::abs(val_q - q1[b]),
                               std::abs(val_p - p1[b]), std::abs(val_u - u1[b])});
            q1[b] = val_q;
            p1[b] = val_p;
            u1[b] = val_u;
            v1[b] = val_p - val_u;
            m1[b] = val_q - val_p;
          }
        }

        // caps and finiteness on the updated level
        for (int l = 0; l < ne; ++l)
          for (int i = 0; i < nt; ++i) {
            const std::size_t idx = static_cast<std::size_t>(l) * nt + i;
            const double worst = std::max(
                {std::abs(u1[idx]), std::abs(v1[idx]), std::abs(m1[idx])});
            if (!std::isfinite(worst)) {
              throw SolverFailure(SolverFailure::Kind::NonFinite,
                                  "non-finite field while marching",
                                  g.theta(i), g.eta(l), v_new);
            }
            if (worst > opt.field_cap) {
              throw SolverFailure(
                  SolverFailure::Kind::FieldCap,
                  "field exceeds cap " + std::to_string(opt.field_cap) +
                      " at (theta, eta, v)",
                  g.theta(i), g.eta(l), v_new);
            }
          }

        if (change <= opt.fixed_point_tol) {
          converged = true;
          rep.max_level_iterations = std::max(rep.max_level_iterations, it + 1);
          break;
        }
      }
    }
    if (!converged) {
      throw SolverFailure(SolverFailure::Kind::FixedPointDiverged,
                          "corner iteration did not converge at v = " +
                              std::to_string(v_new),
                          g.theta0, g.eta0, v_new);
    }

    y_solve_plane(ops, g, v_new, data.y0, data.y1, s1.sy, u1, v1, m1, y1p);
    store_level(j + 1, u1, v1, m1, y1p);

    double f_max = 0.0;
    plane_constraint_max(ops, u1, v1, m1, f_max);
    rep.constraint_max_by_v.push_back(f_max);
    if (f_max > opt.drift_warn_factor * std::max(f0_max, opt.constraint_tol)) {
      rep.warnings.push_back("constraint drift at v = " + std::to_string(v_new) +
                             ": max|F| = " + std::to_string(f_max));
    }

    u0.swap(u1);
    v0.swap(v1);
    m0.swap(m1);
    y0p.swap(y1p);
    std::swap(s0, s1);
  }

  return out;
}

}  // namespace

FieldSet evolve(const BoundaryData& data, const Grid3& grid,
                const EvolveOptions& opt, EvolveReport* report) {
  return march_einstein(data, grid, opt, report);
}

GridFunction solve_y(const GridFunction& U, const GridFunction& V,
                     const GridFunction& M,
                     const std::function<double(double, double)>& y0,
                     const std::function<double(double, double)>& y1,
                     BoundaryMode eta_mode,
                     const std::function<double(double, double, double)>& source) {
  const Grid3& g = U.grid();
  if (!V.grid().same_layout(g) || !M.grid().same_layout(g)) {
    throw ConfigError("solve_y: grid mismatch");
  }
  PlaneOps ops;
  ops.nt = g.n_theta;
  ops.ne = g.n_eta;
  ops.h_theta = g.d_theta;
  ops.h_eta = g.d_eta;
  ops.eta_mode = eta_mode;
  ops.eta_active = g.n_eta >= 3;

  const std::size_t plane = static_cast<std::size_t>(g.n_theta) * g.n_eta;
  std::vector<double> u(plane), vf(plane), m(plane), y(plane), sy(plane, 0.0);
  GridFunction out(g);
  for (int kk = 0; kk < g.n_v; ++kk) {
    for (int l = 0; l < g.n_eta; ++l)
      for (int i = 0; i < g.n_theta; ++i) {
        const std::size_t idx = static_cast<std::size_t>(l) * g.n_theta + i;
        u[idx] = U(i, l, kk);
        vf[idx] = V(i, l, kk);
        m[idx] = M(i, l, kk);
        sy[idx] = source ? source(g.theta(i), g.eta(l), g.v(kk)) : 0.0;
      }
    y_solve_plane(ops, g, g.v(kk), y0, y1, sy, u, vf, m, y);
    for (int l = 0; l < g.n_eta; ++l)
      for (int i = 0; i < g.n_theta; ++i) {
        out(i, l, kk) = y[static_cast<std::size_t>(l) * g.n_theta + i];
      }
  }
  return out;
}

CollidingResult solve_colliding(const CollidingData& data, Interval theta,
                                int n_theta, Interval v, int n_v,
                                const EvolveOptions& opt) {
  Grid3 g = build_grid(theta, Interval{0.0, 1.0}, v, n_theta, 2, n_v);
  g.n_eta = 1;

  BoundaryData bd;
  bd.u0 = [&data](double th, double) { return data.u0(th); };
  bd.v0 = [&data](double th, double) { return data.v0(th); };
  bd.m0 = [&data](double th, double) { return data.m0(th); };
  bd.u1 = [&data](double, double vv) { return data.u1(vv); };
  bd.v1 = [&data](double, double vv) { return data.v1(vv); };
  bd.m1 = [&data](double, double vv) { return data.m1(vv); };
  bd.y0 = nullptr;
  bd.y1 = nullptr;

  CollidingResult res;
  FieldSet fs = march_einstein(bd, g, opt, &res.report);
  res.U = fs.U;
  res.V = fs.V;
  res.M = fs.M;

  // the v-constraint of the exact colliding-plane-wave solution: evaluated
  // and reported only
  GridFunction u_v = diff(fs.U, Axis::V, 1);
  GridFunction u_vv = diff(fs.U, Axis::V, 2);
  GridFunction v_v = diff(fs.V, Axis::V, 1);
  GridFunction m_v = diff(fs.M, Axis::V, 1);
  double mx = 0.0;
  for (int kk = 0; kk < g.n_v; ++kk)
    for (int i = 0; i < g.n_theta; ++i) {
      const double c =
          u_vv(i, 0, kk) -
          0.5 * (u_v(i, 0, kk) * u_v(i, 0, kk) + v_v(i, 0, kk) * v_v(i, 0, kk)) +
          u_v(i, 0, kk) * m_v(i, 0, kk);
      mx = std::max(mx, std::abs(c));
    }
  res.v_constraint_max = mx;
  return res;
}

LinearizationReport linearization_check(const LinearizationProfile& profile,
                                        const Grid3& grid,
                                        std::span<const double> epsilons,
                                        const EvolveOptions& opt) {
  if (epsilons.empty()) throw ConfigError("linearization_check: no epsilons");

  // reference: V_thetav = V_etaeta / 2 with the same discrete arithmetic the
  // full march linearizes to
  DiffractiveData ref_data;
  ref_data.at_v0 = profile.vhat_v0;
  ref_data.at_theta0 = profile.vhat_theta0;
  WaveOptions ref_opt;
  ref_opt.eta_mode = opt.eta_mode;
  ref_opt.fixed_point_tol = opt.fixed_point_tol;
  ref_opt.max_iterations = opt.max_iterations;
  WaveState lin = solve_diffractive(
      ref_data, constant_coefficients(0.0, 0.0, -1.0), grid, ref_opt);

  LinearizationReport rep;
  for (double eps : epsilons) {
    BoundaryData bd;
    bd.u0 = [](double, double) { return 0.0; };
    bd.v0 = [&profile, eps](double th, double et) {
      return eps * profile.vhat_v0(th, et);
    };
    bd.m0 = [&profile, eps](double th, double et) {
      return -eps * profile.vhat_v0(th, et);
    };
    bd.u1 = [](double, double) { return 0.0; };
    bd.v1 = [&profile, eps](double et, double vv) {
      return eps * profile.vhat_theta0(et, vv);
    };
    bd.m1 = [&profile, eps](double et, double vv) {
      return -eps * profile.vhat_theta0(et, vv);
    };
    bd.y0 = nullptr;
    bd.y1 = nullptr;

    EvolveOptions run_opt = opt;
    run_opt.constraint_check = ConstraintPolicy::Off;  // data violates it at O(eps^2)
    FieldSet full = evolve(bd, grid, run_opt);

    double defect = 0.0;
    double u_max = 0.0;
    for (int kk = 0; kk < grid.n_v; ++kk)
      for (int l = 0; l < grid.n_eta; ++l)
        for (int i = 0; i < grid.n_theta; ++i) {
          defect = std::max(defect, std::abs(full.V(i, l, kk) -
                                             eps * lin.a(i, l, kk)));
          u_max = std::max(u_max, std::abs(full.U(i, l, kk)));
        }
    rep.epsilons.push_back(eps);
    rep.defect.push_back(defect);
    rep.defect_rescaled.push_back(defect / eps);
    rep.u_over_eps2.push_back(u_max / (eps * eps));
  }

  if (rep.epsilons.size() >= 3) {
    rep.defect_slope =
        estimate_order(rep.epsilons, rep.defect).observed_order;
    rep.defect_rescaled_slope =
        estimate_order(rep.epsilons, rep.defect_rescaled).observed_order;
  }
  return rep;
}

ConstraintMonitorReport monitor_constraint(const FieldSet& fields) {
  ConstraintField cf = constraint_residual(fields);
  const Grid3& g = fields.grid();
  GridFunction u_v = diff(fields.U, Axis::V, 1);

  ConstraintMonitorReport rep;
  rep.max_abs_by_v = cf.max_abs_by_v;
  double defect = 0.0;
  for (int j = 0; j < g.n_eta; ++j)
    for (int i = 0; i < g.n_theta; ++i) {
      double integral = 0.0;
      double prev = u_v(i, j, 0);
      for (int kk = 1; kk < g.n_v; ++kk) {
        const double cur = u_v(i, j, kk);
        integral += 0.5 * g.d_v * (prev + cur);
        prev = cur;
        const double expected = cf.F(i, j, 0) * std::exp(integral);
        defect = std::max(defect, std::abs(cf.F(i, j, kk) - expected));
      }
    }
  rep.max_defect = defect;
  return rep;
}

}  // namespace gwd
