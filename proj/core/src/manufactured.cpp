#include "gwd/manufactured.hpp"

#include <cmath>

#include "gwd/error.hpp"
#include "gwd/go_solvers.hpp"

namespace gwd {

namespace {

using D = Dual1<3>;

D lift(const Jet2<3>& j) {
  D x(j.val);
  x.d = j.g;
  return x;
}

// the i-th first partial, carrying its own gradient (the Hessian row)
D lift_partial(const Jet2<3>& j, int i) {
  D x(j.g[i]);
  for (int k = 0; k < 3; ++k) x.d[k] = j.h[i][k];
  return x;
}

struct PointJets {
  Jet2<3> u, v, m, y;
};

PointJets jets_at(const AnalyticFieldSet& f, double th, double et, double vv) {
  if (!f.U || !f.V || !f.M || !f.Y) {
    throw ConfigError("analytic field set is incomplete");
  }
  return {f.U.jet(th, et, vv), f.V.jet(th, et, vv), f.M.jet(th, et, vv),
          f.Y.jet(th, et, vv)};
}

}  // namespace

EinsteinResiduals einstein_residuals(const AnalyticFieldSet& f, double theta,
                                     double eta, double v) {
  const PointJets j = jets_at(f, theta, eta, v);
  constexpr int TH = 0, ET = 1, VV = 2;

  const D u = lift(j.u);
  const D y = lift(j.y);
  const D m_th = lift_partial(j.m, TH);
  const D m_et = lift_partial(j.m, ET);
  const D y_th = lift_partial(j.y, TH);
  const D p_th = lift_partial(j.u, TH) + lift_partial(j.v, TH);
  const D p_et = lift_partial(j.u, ET) + lift_partial(j.v, ET);

  const D eu = exp(u);
  const D phi = eu * (m_et + y * m_th) - eu * y_th;
  const D psi = eu * (p_et + y * p_th);

  const double euv = std::exp(j.u.val);
  const double d_phi = euv * (phi.d[ET] + j.y.val * phi.d[TH]);
  const double d_psi = euv * (psi.d[ET] + j.y.val * psi.d[TH]);
  const double ph = phi.v, ps = psi.v;
  const double emq = std::exp(-(j.u.val + j.v.val + j.m.val));

  const double u_th = j.u.g[TH], u_v = j.u.g[VV];
  const double v_th = j.v.g[TH], v_v = j.v.g[VV];
  const double m_thv = j.m.h[TH][VV];
  const double u_thv = j.u.h[TH][VV];
  const double v_thv = j.v.h[TH][VV];

  EinsteinResiduals r;
  r.phi = ph;
  r.psi = ps;
  r.eq1 = j.u.h[TH][TH] - 0.5 * (u_th * u_th + v_th * v_th) + u_th * j.m.g[TH];
  r.eq2 = (phi.d[TH] + psi.d[TH]) - ps * (u_th + v_th);
  r.eq3 = u_thv - u_th * u_v -
          0.5 * emq * (d_phi + d_psi - 0.5 * ph * ph - ph * ps - ps * ps);
  r.eq4 = v_thv - 0.5 * (u_th * v_v + u_v * v_th) -
          0.5 * emq * (-d_phi + 0.5 * ph * ph);
  r.eq5 = m_thv + 0.5 * (u_th * u_v - v_th * v_v) -
          0.5 * emq * (-d_psi - 0.5 * ph * ph + ps * ps);

  const double pp_th = u_th + v_th, pp_v = u_v + v_v;
  r.ee_q = (u_thv + v_thv + m_thv) - 0.5 * pp_th * pp_v -
           0.5 * emq * (-0.5 * ph * ph - ph * ps);
  r.ee_p = (u_thv + v_thv) - 0.5 * u_th * pp_v - 0.5 * u_v * pp_th -
           0.5 * emq * (d_psi - ph * ps - ps * ps);
  r.ee_u = r.eq3;

  const YodeCoefficients yc = yode_coefficients(f, theta, eta, v);
  r.y_ode = j.y.h[TH][TH] - yc.c1 * j.y.g[TH] - yc.c0 * j.y.val - yc.r;
  return r;
}

YodeCoefficients yode_coefficients(const AnalyticFieldSet& f, double theta,
                                   double eta, double v) {
  const PointJets j = jets_at(f, theta, eta, v);
  constexpr int TH = 0, ET = 1, VV = 2;
  const double u_th = j.u.g[TH], v_th = j.v.g[TH];
  YodeCoefficients c;
  c.c1 = j.v.g[TH] + j.m.g[TH];
  c.c0 = (j.v.h[TH][TH] + j.m.h[TH][TH]) - 0.5 * u_th * u_th + u_th * v_th +
         0.5 * v_th * v_th;
  const double q_thet = j.u.h[TH][ET] + j.v.h[TH][ET] + j.m.h[TH][ET];
  c.r = q_thet + j.m.g[ET] * u_th - (j.u.g[ET] + j.v.g[ET]) * v_th;
  return c;
}

GridFunction sample_field(const AnalyticField3& f, const Grid3& g) {
  GridFunction out(g);
  for (int k = 0; k < g.n_v; ++k)
    for (int j = 0; j < g.n_eta; ++j)
      for (int i = 0; i < g.n_theta; ++i) {
        out(i, j, k) = f.value(g.theta(i), g.eta(j), g.v(k));
      }
  return out;
}

FieldSet sample_fields(const AnalyticFieldSet& f, const Grid3& g) {
  FieldSet fs{sample_field(f.U, g), sample_field(f.V, g), sample_field(f.M, g),
              sample_field(f.Y, g), std::nullopt};
  if (f.T) fs.T = sample_field(f.T, g);
  return fs;
}

BoundaryData boundary_from(const AnalyticFieldSet& f) {
  BoundaryData bd;
  bd.u0 = [f](double th, double et) { return f.U.value(th, et, 0.0); };
  bd.v0 = [f](double th, double et) { return f.V.value(th, et, 0.0); };
  bd.m0 = [f](double th, double et) { return f.M.value(th, et, 0.0); };
  bd.u1 = [f](double et, double vv) { return f.U.value(0.0, et, vv); };
  bd.v1 = [f](double et, double vv) { return f.V.value(0.0, et, vv); };
  bd.m1 = [f](double et, double vv) { return f.M.value(0.0, et, vv); };
  bd.y0 = [f](double et, double vv) { return f.Y.value(0.0, et, vv); };
  bd.y1 = [f](double et, double vv) { return f.Y.jet(0.0, et, vv).g[0]; };
  return bd;
}

void attach_mms_sources(const AnalyticFieldSet& f, EvolveOptions& opt) {
  opt.source_q = [f](double th, double et, double vv) {
    return einstein_residuals(f, th, et, vv).ee_q;
  };
  opt.source_p = [f](double th, double et, double vv) {
    return einstein_residuals(f, th, et, vv).ee_p;
  };
  opt.source_u = [f](double th, double et, double vv) {
    return einstein_residuals(f, th, et, vv).ee_u;
  };
  opt.source_y = [f](double th, double et, double vv) {
    return einstein_residuals(f, th, et, vv).y_ode;
  };
}

double max_error(const GridFunction& num, const AnalyticField3& exact) {
  const Grid3& g = num.grid();
  double e = 0.0;
  for (int k = 0; k < g.n_v; ++k)
    for (int j = 0; j < g.n_eta; ++j)
      for (int i = 0; i < g.n_theta; ++i) {
        e = std::max(e, std::abs(num(i, j, k) -
                                 exact.value(g.theta(i), g.eta(j), g.v(k))));
      }
  return e;
}

AnalyticFieldSet mms_einstein_fields() {
  AnalyticFieldSet f;
  f.U = make_field([](auto th, auto et, auto v) {
    return 0.12 * sin(1.1 * th - 0.7 * v + 0.3) +
           0.04 * et * cos(0.9 * th + 0.5 * v);
  });
  f.V = make_field([](auto th, auto et, auto v) {
    return 0.14 * cos(0.9 * th + 0.6 * v) +
           0.05 * et * sin(0.7 * th - 0.4 * v + 0.8);
  });
  f.M = make_field([](auto th, auto et, auto v) {
    return 0.10 * sin(0.8 * th + 0.5 * v + 1.1) +
           0.04 * et * cos(0.6 * th + 0.9 * v);
  });
  f.Y = make_field([](auto th, auto et, auto v) {
    return 0.08 * sin(1.2 * th - 0.5 * v) +
           0.03 * et * cos(0.8 * th + 0.4 * v + 0.5);
  });
  f.T = zero_field();
  return f;
}

BoundaryData constraint_pulse_data(
    std::function<double(double, double)> v0,
    std::function<double(double, double)> v0_theta, double theta_lo) {
  auto u0 = [v0_theta, theta_lo](double th, double et) {
    if (th <= theta_lo) return 0.0;
    const int steps =
        std::max(8, static_cast<int>(std::ceil(400.0 * (th - theta_lo))));
    const double h = (th - theta_lo) / steps;
    double e = 1.0, ep = 0.0;
    auto q = [&](double t) {
      const double s = v0_theta(t, et);
      return -0.25 * s * s;
    };
    for (int s = 0; s < steps; ++s) {
      const double t = theta_lo + s * h;
      const double k1e = ep, k1p = q(t) * e;
      const double k2e = ep + 0.5 * h * k1p, k2p = q(t + 0.5 * h) * (e + 0.5 * h * k1e);
      const double k3e = ep + 0.5 * h * k2p, k3p = q(t + 0.5 * h) * (e + 0.5 * h * k2e);
      const double k4e = ep + h * k3p, k4p = q(t + h) * (e + h * k3e);
      e += (h / 6.0) * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
      ep += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
    if (!(e > 0.0)) {
      throw SolverFailure(SolverFailure::Kind::FieldCap,
                          "pulse data focuses before theta", th, et, 0.0);
    }
    return -2.0 * std::log(e);
  };

  BoundaryData bd;
  bd.u0 = u0;
  bd.v0 = [v0](double th, double et) { return v0(th, et); };
  bd.m0 = [](double, double) { return 0.0; };
  bd.u1 = [](double, double) { return 0.0; };
  bd.v1 = [](double, double) { return 0.0; };
  bd.m1 = [](double, double) { return 0.0; };
  bd.y0 = [](double, double) { return 0.0; };
  bd.y1 = [](double, double) { return 0.0; };
  return bd;
}

// ---------------------------------------------------------------------------

namespace {

void finish_orders(StudyResult& r) {
  for (const auto& [name, errs] : r.errors) {
    if (r.spacings.size() >= 3) {
      r.observed_order[name] =
          estimate_order(r.spacings, errs).observed_order;
    }
  }
}

}  // namespace

StudyResult einstein_mms_study(int levels, int base_n, int n_eta) {
  const AnalyticFieldSet f = mms_einstein_fields();
  StudyResult r;
  r.name = "einstein-mms";
  for (const char* k : {"U", "V", "M", "Y"}) r.errors[k] = {};
  for (int t = 0; t < levels; ++t) {
    const int n = (base_n - 1) * (1 << t) + 1;
    const Grid3 g = build_grid({0.0, 1.0}, {-4.0, 4.0}, {0.0, 1.0}, n, n_eta, n);
    EvolveOptions opt;
    opt.constraint_check = ConstraintPolicy::Off;
    attach_mms_sources(f, opt);
    FieldSet fs = evolve(boundary_from(f), g, opt);
    r.spacings.push_back(g.d_theta);
    r.errors["U"].push_back(max_error(fs.U, f.U));
    r.errors["V"].push_back(max_error(fs.V, f.V));
    r.errors["M"].push_back(max_error(fs.M, f.M));
    r.errors["Y"].push_back(max_error(fs.Y, f.Y));
  }
  finish_orders(r);
  return r;
}

StudyResult colliding_exact_study(int levels, int base_n) {
  StudyResult r;
  r.name = "colliding-exact";
  r.errors["U"] = {};
  const AnalyticField3 exact =
      make_field([](auto th, auto, auto v) { return -log(2.0 + th + v); });
  for (int t = 0; t < levels; ++t) {
    const int n = (base_n - 1) * (1 << t) + 1;
    CollidingData data;
    data.u0 = [](double th) { return -std::log(2.0 + th); };
    data.v0 = [](double) { return 0.0; };
    data.m0 = [](double) { return 0.0; };
    data.u1 = [](double vv) { return -std::log(2.0 + vv); };
    data.v1 = [](double) { return 0.0; };
    data.m1 = [](double) { return 0.0; };
    EvolveOptions opt;
    opt.constraint_check = ConstraintPolicy::Off;  // family violates pc1 by design
    CollidingResult res =
        solve_colliding(data, {0.0, 1.0}, n, {0.0, 1.0}, n, opt);
    r.spacings.push_back(res.U.grid().d_theta);
    r.errors["U"].push_back(max_error(res.U, exact));
  }
  finish_orders(r);
  return r;
}

StudyResult hs_exact_study(int levels, int base_n) {
  StudyResult r;
  r.name = "hs-exact";
  r.errors["a"] = {};
  const double c0 = 1.0;
  const AnalyticField3 exact = make_field(
      [c0](auto th, auto, auto v) { return th * c0 / (1.0 + 0.5 * c0 * v); });
  for (int t = 0; t < levels; ++t) {
    const int n = (base_n - 1) * (1 << t) + 1;
    const Grid3 g = hs_grid({0.0, 1.0}, n, {0.0, 1.0}, n);
    HsData data;
    data.at_v0 = [c0](double th) { return c0 * th; };
    data.at_theta0 = [](double) { return 0.0; };
    WaveState w = solve_hs(data, constant_coefficients(1.0, 0.0, 0.0),
                           WaveformMode::Localized, g);
    r.spacings.push_back(g.d_theta);
    r.errors["a"].push_back(max_error(w.a, exact));
  }
  finish_orders(r);
  return r;
}

StudyResult parabolic_exact_study(int levels) {
  StudyResult r;
  r.name = "parabolic-exact";
  r.errors["a"] = {};
  const AnalyticField3 exact = make_field(
      [](auto th, auto et, auto v) { return cos(et + th + 0.5 * v); });
  for (int t = 0; t < levels; ++t) {
    // v refined quadratically against eta so the swept diffractive term stays
    // inside its step-ratio bound at every level
    const int n_t = 24 * (1 << t) + 1;
    const int n_e = 12 * (1 << t);
    const int n_v = 24 * (1 << (2 * t)) + 1;
    Grid3 g = build_grid({0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, n_t, 2, n_v);
    g.n_eta = n_e;
    g.eta0 = 0.0;
    g.d_eta = 6.283185307179586 / n_e;

    DiffractiveData data;
    data.at_v0 = [](double th, double et) { return std::cos(et + th); };
    data.at_theta0 = [](double et, double vv) { return std::cos(et + 0.5 * vv); };
    WaveOptions opt;
    opt.eta_mode = BoundaryMode::Periodic;
    WaveState w = solve_diffractive(data, constant_coefficients(0.0, 0.0, -1.0),
                                    g, opt);
    r.spacings.push_back(g.d_theta);
    r.errors["a"].push_back(max_error(w.a, exact));
  }
  finish_orders(r);
  return r;
}

StudyResult constraint_pulse_study(int levels, int base_n, int base_n_eta) {
  StudyResult r;
  r.name = "constraint-pulse";
  r.errors["max_F"] = {};
  auto v0 = [](double th, double et) {
    return 0.15 * quartic_bump(th, 0.15, 0.85) * std::exp(-0.25 * et * et);
  };
  auto v0_theta = [](double th, double et) {
    Dual1<1> t(th);
    t.d[0] = 1.0;
    const Dual1<1> b = quartic_bump(t, 0.15, 0.85);
    return 0.15 * b.d[0] * std::exp(-0.25 * et * et);
  };
  const BoundaryData bd = constraint_pulse_data(v0, v0_theta, 0.0);
  for (int t = 0; t < levels; ++t) {
    const int n = (base_n - 1) * (1 << t) + 1;
    const int ne = (base_n_eta - 1) * (1 << t) + 1;
    const Grid3 g = build_grid({0.0, 1.0}, {-4.0, 4.0}, {0.0, 1.0}, n, ne, n);
    EvolveOptions opt;
    opt.constraint_tol = 1e-2;  // data satisfies it to stencil accuracy
    EvolveReport rep;
    evolve(bd, g, opt, &rep);
    double worst = 0.0;
    for (double x : rep.constraint_max_by_v) worst = std::max(worst, x);
    r.spacings.push_back(g.d_theta);
    r.errors["max_F"].push_back(worst);
  }
  finish_orders(r);
  return r;
}

}  // namespace gwd
