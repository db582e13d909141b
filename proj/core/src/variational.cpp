#include "gwd/variational.hpp"

#include <cmath>
#include <random>

#include "gwd/error.hpp"
#include "gwd/fields.hpp"

namespace gwd {

ActionEvaluation lagrangian_density(const FieldSet& fields,
                                    BoundaryMode eta_mode) {
  fields.validate();
  const Grid3& g = fields.grid();
  const GridFunction zero(g);
  const GridFunction& T = fields.T ? *fields.T : zero;

  GridFunction u_th = diff(fields.U, Axis::Theta, 1);
  GridFunction u_thth = diff(fields.U, Axis::Theta, 2);
  GridFunction u_thv = diff(u_th, Axis::V, 1);
  GridFunction u_v = diff(fields.U, Axis::V, 1);
  GridFunction v_th = diff(fields.V, Axis::Theta, 1);
  GridFunction v_v = diff(fields.V, Axis::V, 1);
  GridFunction m_th = diff(fields.M, Axis::Theta, 1);
  GridFunction m_thth = diff(fields.M, Axis::Theta, 2);
  GridFunction m_thv = diff(diff(fields.M, Axis::Theta, 1), Axis::V, 1);
  GridFunction t_th = diff(T, Axis::Theta, 1);
  GridFunction t_thth = diff(T, Axis::Theta, 2);

  AuxFields aux = make_aux_fields(fields, eta_mode);
  GridFunction d_phi = apply_D_eta(fields, aux.phi, eta_mode);
  GridFunction d_psi = apply_D_eta(fields, aux.psi, eta_mode);

  ActionEvaluation ev{GridFunction(g), 0.0};
  for (int k = 0; k < g.n_v; ++k)
    for (int j = 0; j < g.n_eta; ++j)
      for (int i = 0; i < g.n_theta; ++i) {
        const double U = fields.U(i, j, k);
        const double emq =
            std::exp(-(U + fields.V(i, j, k) + fields.M(i, j, k)));
        const double ph = aux.phi(i, j, k);
        const double ps = aux.psi(i, j, k);
        const double bracket = -2.0 * d_phi(i, j, k) - d_psi(i, j, k) +
                               1.5 * ph * ph + 2.0 * ph * ps + ps * ps;
        const double ut = u_th(i, j, k);
        const double vt = v_th(i, j, k);
        const double inner =
            2.0 * m_thv(i, j, k) + 4.0 * u_thv(i, j, k) -
            vt * v_v(i, j, k) - 3.0 * ut * u_v(i, j, k) - t_thth(i, j, k) +
            t_th(i, j, k) * (m_th(i, j, k) + 2.0 * ut) +
            T(i, j, k) * (m_thth(i, j, k) + 2.0 * u_thth(i, j, k) -
                          1.5 * ut * ut - 0.5 * vt * vt) +
            emq * bracket;
        ev.density(i, j, k) = std::exp(-U) * inner;
      }
  ev.action = integrate(ev.density, BoundaryMode::OneSided, eta_mode,
                        BoundaryMode::OneSided);
  return ev;
}

namespace {

void check_interior_probe(const GridFunction& probe) {
  const Grid3& g = probe.grid();
  auto nonzero = [&](int i, int j, int k) { return probe(i, j, k) != 0.0; };
  for (int j = 0; j < g.n_eta; ++j)
    for (int i = 0; i < g.n_theta; ++i) {
      if (nonzero(i, j, 0) || nonzero(i, j, g.n_v - 1)) {
        throw ConfigError("variational probe touches a v boundary face");
      }
    }
  for (int k = 0; k < g.n_v; ++k)
    for (int j = 0; j < g.n_eta; ++j) {
      if (nonzero(0, j, k) || nonzero(g.n_theta - 1, j, k)) {
        throw ConfigError("variational probe touches a theta boundary face");
      }
    }
  if (g.n_eta > 1) {
    for (int k = 0; k < g.n_v; ++k)
      for (int i = 0; i < g.n_theta; ++i) {
        if (nonzero(i, 0, k) || nonzero(i, g.n_eta - 1, k)) {
          throw ConfigError("variational probe touches an eta boundary face");
        }
      }
  }
}

GridFunction* field_of(FieldSet& fs, VariationDirection dir) {
  switch (dir) {
    case VariationDirection::U: return &fs.U;
    case VariationDirection::V: return &fs.V;
    case VariationDirection::M: return &fs.M;
    case VariationDirection::Y: return &fs.Y;
    case VariationDirection::T: return fs.T ? &*fs.T : nullptr;
  }
  return nullptr;
}

}  // namespace

double variational_residual(const FieldSet& fields, VariationDirection dir,
                            const GridFunction& probe, double step,
                            BoundaryMode eta_mode) {
  if (!(step > 0.0)) throw ConfigError("variational step must be positive");
  if (!probe.grid().same_layout(fields.grid())) {
    throw ConfigError("variational probe grid mismatch");
  }
  check_interior_probe(probe);

  FieldSet plus{fields.U, fields.V, fields.M, fields.Y,
                fields.T ? fields.T : std::optional<GridFunction>(
                                          GridFunction(fields.grid()))};
  FieldSet minus = plus;
  GridFunction* fp = field_of(plus, dir);
  GridFunction* fm = field_of(minus, dir);
  for (std::size_t n = 0; n < probe.values().size(); ++n) {
    fp->values()[n] += step * probe.values()[n];
    fm->values()[n] -= step * probe.values()[n];
  }
  const double s_plus = lagrangian_density(plus, eta_mode).action;
  const double s_minus = lagrangian_density(minus, eta_mode).action;
  return (s_plus - s_minus) / (2.0 * step);
}

GridFunction random_interior_probe(const Grid3& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.25, 0.75);
  std::uniform_real_distribution<double> amp(0.5, 1.0);
  const double tc = unit(rng), ec = unit(rng), vc = unit(rng);
  const double a = amp(rng);

  const double th_lo = grid.theta0, th_hi = grid.theta(grid.n_theta - 1);
  const double et_lo = grid.eta0, et_hi = grid.eta(grid.n_eta - 1);
  const double v_lo = grid.v0, v_hi = grid.v(grid.n_v - 1);

  // bump support spans the middle of the box, centered near (tc, ec, vc)
  auto window = [](double lo, double hi, double c) {
    const double w = 0.35 * (hi - lo);
    const double center = lo + c * (hi - lo);
    return Interval{center - w * 0.5, center + w * 0.5};
  };
  const Interval tw = window(th_lo, th_hi, tc);
  const Interval ew = window(et_lo, et_hi, ec);
  const Interval vw = window(v_lo, v_hi, vc);

  GridFunction p(grid);
  for (int k = 0; k < grid.n_v; ++k)
    for (int j = 0; j < grid.n_eta; ++j)
      for (int i = 0; i < grid.n_theta; ++i) {
        double val = a * quartic_bump(grid.theta(i), tw.lo, tw.hi) *
                     quartic_bump(grid.v(k), vw.lo, vw.hi);
        if (grid.n_eta > 1) val *= quartic_bump(grid.eta(j), ew.lo, ew.hi);
        p(i, j, k) = val;
      }
  return p;
}

}  // namespace gwd
