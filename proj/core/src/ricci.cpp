#include "gwd/ricci.hpp"

#include <cmath>
#include <memory>

#include "gwd/error.hpp"

namespace gwd {

namespace {

using D = Dual1<7>;  // value plus gradient in the 7 expansion variables

constexpr int TH = 0;  // theta
// eta^a directions for a = 2, 3 are 1, 2; x^mu directions are 3 + mu

D jval(const Jet2<7>& j) {
  D x(j.val);
  x.d = j.g;
  return x;
}

D jder(const Jet2<7>& j, int dir) {
  D x(j.g[dir]);
  for (int k = 0; k < kVars; ++k) x.d[k] = j.h[dir][k];
  return x;
}

template <class S>
std::array<std::array<S, 4>, 4> invert4(const std::array<std::array<S, 4>, 4>& a) {
  std::array<std::array<S, 4>, 4> m = a;
  std::array<std::array<S, 4>, 4> inv{};
  for (int i = 0; i < 4; ++i) inv[i][i] = S(1.0);
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    double best = std::abs(scalar_value(m[col][col]));
    for (int r = col + 1; r < 4; ++r) {
      const double cand = std::abs(scalar_value(m[r][col]));
      if (cand > best) {
        best = cand;
        pivot = r;
      }
    }
    if (best < 1e-14) throw ConfigError("singular leading-order metric");
    std::swap(m[col], m[pivot]);
    std::swap(inv[col], inv[pivot]);
    const S scale = S(1.0) / m[col][col];
    for (int c = 0; c < 4; ++c) {
      m[col][c] = m[col][c] * scale;
      inv[col][c] = inv[col][c] * scale;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const S f = m[r][col];
      for (int c = 0; c < 4; ++c) {
        m[r][c] = m[r][c] - f * m[col][c];
        inv[r][c] = inv[r][c] - f * inv[col][c];
      }
    }
  }
  return inv;
}

using Mat4D = std::array<std::array<D, 4>, 4>;
using Gamma4D = std::array<std::array<std::array<D, 4>, 4>, 4>;

struct OrderD {
  Mat4D val;
  std::array<std::array<std::array<D, 7>, 4>, 4> der;
};

OrderD lift_order(const Sym4Jet& j) {
  OrderD o;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      o.val[a][b] = jval(j[a][b]);
      for (int dir = 0; dir < kVars; ++dir) o.der[a][b][dir] = jder(j[a][b], dir);
    }
  return o;
}

enum class DKind { Theta, Eta, X };

// lower-index derivative bracket B_{mu, al, be} of one covariant order
Gamma4D bracket(const OrderD& o, DKind kind, const std::array<double, 4>& du,
                const std::array<std::array<double, 4>, 2>& dy) {
  Gamma4D b{};
  for (int mu = 0; mu < 4; ++mu)
    for (int al = 0; al < 4; ++al)
      for (int be = 0; be < 4; ++be) {
        D acc(0.0);
        switch (kind) {
          case DKind::Theta:
            acc = o.der[be][mu][TH] * du[al] + o.der[al][mu][TH] * du[be] -
                  o.der[al][be][TH] * du[mu];
            break;
          case DKind::Eta:
            for (int a = 0; a < 2; ++a) {
              acc += o.der[be][mu][1 + a] * dy[a][al] +
                     o.der[al][mu][1 + a] * dy[a][be] -
                     o.der[al][be][1 + a] * dy[a][mu];
            }
            break;
          case DKind::X:
            acc = o.der[be][mu][3 + al] + o.der[al][mu][3 + be] -
                  o.der[al][be][3 + mu];
            break;
        }
        b[mu][al][be] = acc;
      }
  return b;
}

Gamma4D contract(const Mat4D& raise, const Gamma4D& b, double weight) {
  Gamma4D g{};
  for (int l = 0; l < 4; ++l)
    for (int al = 0; al < 4; ++al)
      for (int be = 0; be < 4; ++be) {
        D acc(0.0);
        for (int mu = 0; mu < 4; ++mu) acc += raise[l][mu] * b[mu][al][be];
        g[l][al][be] = acc * weight;
      }
  return g;
}

void add_in(Gamma4D& dst, const Gamma4D& src) {
  for (int l = 0; l < 4; ++l)
    for (int al = 0; al < 4; ++al)
      for (int be = 0; be < 4; ++be) dst[l][al][be] += src[l][al][be];
}

struct GammaDual {
  Gamma4D m2, m1, z0;  // eps^-2, eps^-1, eps^0
};

GammaDual christoffel_orders_dual(const MetricExpansion& m,
                                  const ExpansionPoint& p) {
  if (!m.g0 || !m.g1 || !m.g2) throw ConfigError("metric expansion incomplete");
  const OrderD o0 = lift_order(m.g0(p));
  const OrderD o1 = lift_order(m.g1(p));
  const OrderD o2 = lift_order(m.g2(p));

  const Mat4D h0 = invert4<D>(o0.val);

  // raised first-order metric and the second-order inverse correction
  Mat4D g1up{}, g2up{}, h2{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      D acc1(0.0), acc2(0.0);
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
          acc1 += h0[a][mu] * h0[b][nu] * o1.val[mu][nu];
          acc2 += h0[a][mu] * h0[b][nu] * o2.val[mu][nu];
        }
      g1up[a][b] = acc1;
      g2up[a][b] = acc2;
    }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      D corr(0.0);
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
          corr += o0.val[mu][nu] * g1up[a][mu] * g1up[b][nu];
        }
      h2[a][b] = corr - g2up[a][b];
    }

  const Gamma4D bt0 = bracket(o0, DKind::Theta, m.du, m.dy);
  const Gamma4D bt1 = bracket(o1, DKind::Theta, m.du, m.dy);
  const Gamma4D bt2 = bracket(o2, DKind::Theta, m.du, m.dy);
  const Gamma4D be0 = bracket(o0, DKind::Eta, m.du, m.dy);
  const Gamma4D be1 = bracket(o1, DKind::Eta, m.du, m.dy);
  const Gamma4D bx0 = bracket(o0, DKind::X, m.du, m.dy);

  GammaDual g;
  g.m2 = contract(h0, bt0, 0.5);

  g.m1 = contract(h0, be0, 0.5);
  add_in(g.m1, contract(h0, bt1, 0.5));
  add_in(g.m1, contract(g1up, bt0, -0.5));

  g.z0 = contract(h0, bx0, 0.5);
  add_in(g.z0, contract(h0, be1, 0.5));
  add_in(g.z0, contract(g1up, be0, -0.5));
  add_in(g.z0, contract(h0, bt2, 0.5));
  add_in(g.z0, contract(g1up, bt1, -0.5));
  add_in(g.z0, contract(h2, bt0, 0.5));
  return g;
}

double quad(const Gamma4D& a, const Gamma4D& b, int al, int be) {
  double acc = 0.0;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      acc += a[mu][al][be].v * b[nu][mu][nu].v;
      acc -= a[mu][al][nu].v * b[nu][be][mu].v;
    }
  return acc;
}

// derivative pieces: d(Gamma^mu_{al,be}, dir) u_mu - d(Gamma^mu_{be,mu}, dir) u_al
double dpair_theta(const Gamma4D& g, int al, int be,
                   const std::array<double, 4>& du) {
  double acc = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    acc += g[mu][al][be].d[TH] * du[mu];
    acc -= g[mu][be][mu].d[TH] * du[al];
  }
  return acc;
}

double dpair_eta(const Gamma4D& g, int al, int be,
                 const std::array<std::array<double, 4>, 2>& dy) {
  double acc = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int mu = 0; mu < 4; ++mu) {
      acc += g[mu][al][be].d[1 + a] * dy[a][mu];
      acc -= g[mu][be][mu].d[1 + a] * dy[a][al];
    }
  return acc;
}

double dpair_x(const Gamma4D& g, int al, int be) {
  double acc = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    acc += g[mu][al][be].d[3 + mu];
    acc -= g[mu][be][mu].d[3 + al];
  }
  return acc;
}

}  // namespace

void MetricExpansion::check_block_structure(const ExpansionPoint& p) const {
  if (!g0 || !g1 || !g2) throw ConfigError("metric expansion incomplete");
  const Sym4Jet j0 = g0(p);
  const Sym4Jet j1 = g1(p);
  const Sym4Jet j2 = g2(p);
  auto expect_zero = [](const Jet2<7>& j, const char* what) {
    if (j.val != 0.0) {
      throw ConfigError(std::string("nonzero entry in a zero block: ") + what);
    }
  };
  // leading order: only (01), (ab) may be nonzero
  expect_zero(j0[0][0], "g0_00");
  expect_zero(j0[0][2], "g0_02");
  expect_zero(j0[0][3], "g0_03");
  expect_zero(j0[1][1], "g0_11");
  expect_zero(j0[1][2], "g0_12");
  expect_zero(j0[1][3], "g0_13");
  // first order: only (1a), (ab)
  for (int b = 0; b < 4; ++b) expect_zero(j1[0][b], "g1_0*");
  expect_zero(j1[1][1], "g1_11");
  // second order: only (ij), i, j in {1,2,3}
  for (int b = 0; b < 4; ++b) expect_zero(j2[0][b], "g2_0*");

  std::array<std::array<double, 4>, 4> v{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) v[a][b] = j0[a][b].val;
  const double det01 = v[0][1] * v[1][0];
  const double detab = v[2][2] * v[3][3] - v[2][3] * v[3][2];
  if (std::abs(det01) < 1e-12 || std::abs(detab) < 1e-12) {
    throw ConfigError("leading-order metric is singular at the point");
  }
}

ChristoffelOrders christoffel_orders(const MetricExpansion& m,
                                     const ExpansionPoint& p) {
  const GammaDual g = christoffel_orders_dual(m, p);
  ChristoffelOrders out{};
  for (int l = 0; l < 4; ++l)
    for (int al = 0; al < 4; ++al)
      for (int be = 0; be < 4; ++be) {
        out.order_m2[l][al][be] = g.m2[l][al][be].v;
        out.order_m1[l][al][be] = g.m1[l][al][be].v;
        out.order_0[l][al][be] = g.z0[l][al][be].v;
      }
  return out;
}

RicciOrders ricci_orders(const MetricExpansion& m, const ExpansionPoint& p) {
  const GammaDual g = christoffel_orders_dual(m, p);
  RicciOrders r{};
  for (int al = 0; al < 4; ++al)
    for (int be = 0; be < 4; ++be) {
      r.r4[al][be] = dpair_theta(g.m2, al, be, m.du) + quad(g.m2, g.m2, al, be);

      r.r3[al][be] = dpair_theta(g.m1, al, be, m.du) +
                     dpair_eta(g.m2, al, be, m.dy) +
                     quad(g.m2, g.m1, al, be) + quad(g.m1, g.m2, al, be);

      r.r2[al][be] = dpair_theta(g.z0, al, be, m.du) +
                     dpair_eta(g.m1, al, be, m.dy) + dpair_x(g.m2, al, be) +
                     quad(g.m2, g.z0, al, be) + quad(g.z0, g.m2, al, be) +
                     quad(g.m1, g.m1, al, be);
    }
  return r;
}

// ---------------------------------------------------------------------------
// exact assembled metric at finite eps

namespace {

OrderD assemble(const MetricExpansion& m, const ExpansionPoint& p, double eps) {
  const Sym4Jet j0 = m.g0(p);
  const Sym4Jet j1 = m.g1(p);
  const Sym4Jet j2 = m.g2(p);
  Sym4Jet full{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Jet2<7>& f = full[a][b];
      f.val = j0[a][b].val + eps * j1[a][b].val + eps * eps * j2[a][b].val;
      for (int i = 0; i < kVars; ++i) {
        f.g[i] = j0[a][b].g[i] + eps * j1[a][b].g[i] + eps * eps * j2[a][b].g[i];
        for (int k = 0; k < kVars; ++k) {
          f.h[i][k] = j0[a][b].h[i][k] + eps * j1[a][b].h[i][k] +
                      eps * eps * j2[a][b].h[i][k];
        }
      }
    }
  return lift_order(full);
}

// multiple-scales spacetime derivative of an entry from its 7 partials
D ms_deriv(const std::array<std::array<std::array<D, 7>, 4>, 4>& der, int a,
           int b, int mu, const MetricExpansion& m, double eps) {
  D acc = der[a][b][TH] * (m.du[mu] / (eps * eps));
  acc += der[a][b][1] * (m.dy[0][mu] / eps);
  acc += der[a][b][2] * (m.dy[1][mu] / eps);
  acc += der[a][b][3 + mu];
  return acc;
}

Gamma4D exact_christoffel_dual(const MetricExpansion& m,
                               const ExpansionPoint& p, double eps) {
  const OrderD g = assemble(m, p, eps);
  const Mat4D inv = invert4<D>(g.val);
  Gamma4D gam{};
  for (int l = 0; l < 4; ++l)
    for (int al = 0; al < 4; ++al)
      for (int be = 0; be < 4; ++be) {
        D acc(0.0);
        for (int mu = 0; mu < 4; ++mu) {
          acc += inv[l][mu] * (ms_deriv(g.der, be, mu, al, m, eps) +
                               ms_deriv(g.der, al, mu, be, m, eps) -
                               ms_deriv(g.der, al, be, mu, m, eps));
        }
        gam[l][al][be] = acc * 0.5;
      }
  return gam;
}

double ms_deriv_value(const D& q, int mu, const MetricExpansion& m, double eps) {
  return q.d[TH] * (m.du[mu] / (eps * eps)) + q.d[1] * (m.dy[0][mu] / eps) +
         q.d[2] * (m.dy[1][mu] / eps) + q.d[3 + mu];
}

// Newton interpolation through (xs, ys), expanded to monomial coefficients.
std::vector<double> interp_coeffs(std::span<const double> xs,
                                  std::span<const double> ys) {
  const int n = static_cast<int>(xs.size());
  std::vector<double> dd(ys.begin(), ys.end());
  for (int level = 1; level < n; ++level) {
    for (int i = n - 1; i >= level; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
    }
  }
  // expand sum_k dd[k] prod_{j<k} (x - xs[j])
  std::vector<double> coeffs(n, 0.0);
  std::vector<double> basis(n, 0.0);
  basis[0] = 1.0;
  int deg = 0;
  for (int k = 0; k < n; ++k) {
    for (int d2 = 0; d2 <= deg; ++d2) coeffs[d2] += dd[k] * basis[d2];
    if (k + 1 < n) {
      for (int d2 = deg + 1; d2 >= 1; --d2) {
        basis[d2] = basis[d2 - 1] - xs[k] * basis[d2];
      }
      basis[0] = -xs[k] * basis[0];
      ++deg;
    }
  }
  return coeffs;
}

}  // namespace

Gamma4 exact_christoffel(const MetricExpansion& m, const ExpansionPoint& p,
                         double eps) {
  const Gamma4D gam = exact_christoffel_dual(m, p, eps);
  Gamma4 out{};
  for (int l = 0; l < 4; ++l)
    for (int al = 0; al < 4; ++al)
      for (int be = 0; be < 4; ++be) out[l][al][be] = gam[l][al][be].v;
  return out;
}

Mat4 exact_ricci(const MetricExpansion& m, const ExpansionPoint& p,
                 double eps) {
  const Gamma4D gam = exact_christoffel_dual(m, p, eps);
  Mat4 r{};
  for (int al = 0; al < 4; ++al)
    for (int be = 0; be < 4; ++be) {
      double acc = 0.0;
      for (int l = 0; l < 4; ++l) {
        acc += ms_deriv_value(gam[l][al][be], l, m, eps);
        acc -= ms_deriv_value(gam[l][be][l], al, m, eps);
      }
      for (int l = 0; l < 4; ++l)
        for (int mu = 0; mu < 4; ++mu) {
          acc += gam[l][al][be].v * gam[mu][l][mu].v;
          acc -= gam[mu][al][l].v * gam[l][be][mu].v;
        }
      r[al][be] = acc;
    }
  return r;
}

std::vector<double> default_extraction_eps() {
  return {0.02, 0.01, 0.005, 0.0025};
}

ChristoffelOrders christoffel_orders_bruteforce(
    const MetricExpansion& m, const ExpansionPoint& p,
    std::span<const double> eps_values) {
  const int n = static_cast<int>(eps_values.size());
  if (n < 3) throw ConfigError("extraction needs at least 3 eps samples");
  std::vector<Gamma4> samples(n);
  for (int s = 0; s < n; ++s) samples[s] = exact_christoffel(m, p, eps_values[s]);

  ChristoffelOrders out{};
  std::vector<double> ys(n);
  for (int l = 0; l < 4; ++l)
    for (int al = 0; al < 4; ++al)
      for (int be = 0; be < 4; ++be) {
        for (int s = 0; s < n; ++s) {
          ys[s] = eps_values[s] * eps_values[s] * samples[s][l][al][be];
        }
        const std::vector<double> c = interp_coeffs(eps_values, ys);
        out.order_m2[l][al][be] = c[0];
        out.order_m1[l][al][be] = c.size() > 1 ? c[1] : 0.0;
        out.order_0[l][al][be] = c.size() > 2 ? c[2] : 0.0;
      }
  return out;
}

RicciOrders ricci_orders_bruteforce(const MetricExpansion& m,
                                    const ExpansionPoint& p,
                                    std::span<const double> eps_values) {
  const int n = static_cast<int>(eps_values.size());
  if (n < 3) throw ConfigError("extraction needs at least 3 eps samples");
  std::vector<Mat4> samples(n);
  for (int s = 0; s < n; ++s) samples[s] = exact_ricci(m, p, eps_values[s]);

  RicciOrders out{};
  std::vector<double> ys(n);
  for (int al = 0; al < 4; ++al)
    for (int be = 0; be < 4; ++be) {
      for (int s = 0; s < n; ++s) {
        const double e2 = eps_values[s] * eps_values[s];
        ys[s] = e2 * e2 * samples[s][al][be];
      }
      const std::vector<double> c = interp_coeffs(eps_values, ys);
      out.r4[al][be] = c[0];
      out.r3[al][be] = c.size() > 1 ? c[1] : 0.0;
      out.r2[al][be] = c.size() > 2 ? c[2] : 0.0;
    }
  return out;
}

// ---------------------------------------------------------------------------
// per-component formulas for the standard-form metric

namespace {

using DD = Dual2<7>;

DD dd_of(const Jet2<7>& j) {
  DD x;
  x.v.v = j.val;
  for (int i = 0; i < kVars; ++i) {
    x.v.d[i] = j.g[i];
    x.d[i].v = j.g[i];
    for (int k = 0; k < kVars; ++k) x.d[i].d[k] = j.h[i][k];
  }
  return x;
}

// first-order views of a second-order object
D vview(const DD& x) {
  D r(x.v.v);
  r.d = x.v.d;
  return r;
}
D dview(const DD& x, int dir) {
  D r(x.v.d[dir]);
  for (int k = 0; k < kVars; ++k) r.d[k] = x.d[dir].d[k];
  return r;
}

inline double val(const DD& x) { return x.v.v; }
inline double d1(const DD& x, int dir) { return x.v.d[dir]; }
inline double d2v(const DD& x, int i, int j) { return x.d[i].d[j]; }
inline int ed(int a) { return a - 1; }  // eta direction of transverse index a

}  // namespace

ComponentRicci component_ricci(const MetricExpansion& m,
                               const ExpansionPoint& p) {
  if (!m.g0 || !m.g1) throw ConfigError("metric expansion incomplete");
  const Sym4Jet j0 = m.g0(p);
  const Sym4Jet j1 = m.g1(p);

  std::array<std::array<DD, 4>, 4> G0{}, G1{}, inv0{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      G0[a][b] = dd_of(j0[a][b]);
      G1[a][b] = dd_of(j1[a][b]);
    }
  inv0 = invert4<DD>(G0);
  const DD& i01 = inv0[0][1];

  // raised first-order objects (leading metric raises indices)
  std::array<DD, 4> up0{}, mix1{}, low0{};
  for (int a = 2; a <= 3; ++a) {
    DD acc(0.0);
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        acc += inv0[0][mu] * inv0[a][nu] * G1[mu][nu];  // g1^{0a}
      }
    up0[a] = acc;
    DD accm(0.0);
    for (int mu = 0; mu < 4; ++mu) accm += inv0[a][mu] * G1[mu][1];  // g1^a_1
    mix1[a] = accm;
  }
  for (int c = 2; c <= 3; ++c) {
    DD acc(0.0);
    for (int mu = 0; mu < 4; ++mu) acc += inv0[0][mu] * G1[mu][c];  // g1^0_c
    low0[c] = acc;
  }

  // transverse traces g0^{cd} g0_{cd,dir}
  auto w23 = [&](int dir) {
    D acc(0.0);
    for (int c = 2; c <= 3; ++c)
      for (int d = 2; d <= 3; ++d) acc += vview(inv0[c][d]) * dview(G0[c][d], dir);
    return acc;
  };
  const D w23_th = w23(TH);
  const D p01_th = vview(i01) * dview(G0[0][1], TH);

  ComponentRicci out;

  {  // R^(-4)_00
    double t3 = 0.0;
    for (int a = 2; a <= 3; ++a)
      for (int b = 2; b <= 3; ++b)
        for (int c = 2; c <= 3; ++c)
          for (int d = 2; d <= 3; ++d) {
            t3 += val(inv0[a][c]) * d1(G0[b][c], TH) * val(inv0[b][d]) *
                  d1(G0[a][d], TH);
          }
    out.r4_00 = -0.5 * w23_th.d[TH] + 0.5 * p01_th.v * w23_th.v - 0.25 * t3;
  }

  {  // R^(-3)_00
    DD tr(0.0);
    for (int a = 2; a <= 3; ++a) {
      DD acc(0.0);
      for (int mu = 0; mu < 4; ++mu) acc += inv0[a][mu] * G1[mu][a];
      tr += acc;
    }
    double t3 = 0.0;
    for (int b = 2; b <= 3; ++b)
      for (int c = 2; c <= 3; ++c)
        for (int d = 2; d <= 3; ++d) {
          DD mixcd(0.0);
          for (int mu = 0; mu < 4; ++mu) mixcd += inv0[c][mu] * G1[mu][d];
          t3 += val(inv0[b][d]) * d1(G0[b][c], TH) * d1(mixcd, TH);
        }
    out.r3_00 = -0.5 * d2v(tr, TH, TH) + 0.5 * p01_th.v * d1(tr, TH) - 0.5 * t3;
  }

  for (int a = 2; a <= 3; ++a) {  // R^(-3)_0a
    D z1(0.0);
    for (int b = 2; b <= 3; ++b) {
      z1 += vview(G0[a][b]) * vview(i01) * dview(mix1[b], TH);
    }
    const double t1 = 0.5 * z1.d[TH];
    const double t2 = 0.25 * w23_th.v * z1.v;
    double t3 = 0.0;
    for (int c = 2; c <= 3; ++c) {
      D z3(0.0);
      for (int b = 2; b <= 3; ++b) z3 += vview(inv0[b][c]) * dview(G0[a][b], TH);
      t3 += 0.5 * z3.d[ed(c)];
    }
    D z4 = vview(i01) * dview(G0[0][1], ed(a));
    for (int c = 2; c <= 3; ++c)
      for (int d = 2; d <= 3; ++d) z4 += vview(inv0[c][d]) * dview(G0[c][d], ed(a));
    const double t4 = -0.5 * z4.d[TH];
    double t5 = 0.0;
    for (int b = 2; b <= 3; ++b)
      for (int c = 2; c <= 3; ++c) {
        t5 += 0.25 * val(inv0[b][c]) * d1(G0[a][b], TH) * w23(ed(c)).v;
      }
    const double t6 =
        0.25 * val(i01) * d1(G0[0][1], ed(a)) * w23_th.v;
    double t7 = 0.0;
    for (int b = 2; b <= 3; ++b)
      for (int c = 2; c <= 3; ++c)
        for (int d = 2; d <= 3; ++d)
          for (int e = 2; e <= 3; ++e) {
            t7 += val(inv0[b][d]) * d1(G0[c][d], TH) * val(inv0[c][e]) *
                  d1(G0[b][e], ed(a));
          }
    out.r3_0a[a - 2] = t1 + t2 + t3 + t4 + t5 + t6 - 0.25 * t7;
  }

  {  // R^(-2)_01
    D z = vview(i01) * dview(G0[0][1], 4);
    for (int c = 2; c <= 3; ++c)
      for (int d = 2; d <= 3; ++d) {
        z += 0.5 * (vview(inv0[c][d]) * dview(G0[c][d], 4));
      }
    double s1 = -z.d[TH];
    double s2 = 0.0;
    for (int a = 2; a <= 3; ++a)
      for (int b = 2; b <= 3; ++b)
        for (int c = 2; c <= 3; ++c)
          for (int d = 2; d <= 3; ++d) {
            s2 += val(inv0[a][c]) * d1(G0[b][c], TH) * val(inv0[b][d]) *
                  d1(G0[a][d], 4);
          }
    s2 *= -0.25;
    double s3 = 0.0, s4 = 0.0, s5 = 0.0;
    for (int a = 2; a <= 3; ++a) {
      const D wfac = dview(G0[0][1], ed(a)) - dview(G1[1][a], TH);
      const D za = wfac * vview(up0[a]);
      s3 += 0.5 * za.d[TH];
      for (int b = 2; b <= 3; ++b) {
        const D zab = wfac * vview(inv0[a][b]);
        s4 -= 0.5 * zab.d[ed(b)];
      }
      double inner = val(up0[a]) * w23_th.v;
      for (int b = 2; b <= 3; ++b) inner -= val(inv0[a][b]) * w23(ed(b)).v;
      s5 += 0.25 * wfac.v * inner;
    }
    out.r2_01 = s1 + s2 + s3 + s4 + s5;
  }

  // starred transverse curvature and R^(-2)_ab
  for (int a = 2; a <= 3; ++a)
    for (int b = 2; b <= 3; ++b) {
      double star = 0.0;
      for (int c = 2; c <= 3; ++c) {
        D zc(0.0);
        for (int d = 2; d <= 3; ++d) {
          zc += vview(inv0[c][d]) * (dview(G0[b][d], ed(a)) +
                                     dview(G0[a][d], ed(b)) -
                                     dview(G0[a][b], ed(d)));
        }
        star += 0.5 * zc.d[ed(c)];
      }
      // second term with the correct pairing
      for (int c = 2; c <= 3; ++c)
        for (int d = 2; d <= 3; ++d) {
          const double sym = d1(G0[b][d], ed(a)) + d1(G0[a][d], ed(b)) -
                             d1(G0[a][b], ed(d));
          const double p01c = val(i01) * d1(G0[0][1], ed(c));
          star += 0.5 * val(inv0[c][d]) * sym * (p01c + 0.5 * w23(ed(c)).v);
        }
      {
        D z = vview(i01) * dview(G0[0][1], ed(a));
        for (int c = 2; c <= 3; ++c)
          for (int d = 2; d <= 3; ++d) {
            z += 0.5 * (vview(inv0[c][d]) * dview(G0[c][d], ed(a)));
          }
        star -= z.d[ed(b)];
      }
      star -= 0.5 * (val(i01) * d1(G0[0][1], ed(a))) *
              (val(i01) * d1(G0[0][1], ed(b)));
      for (int c = 2; c <= 3; ++c)
        for (int d = 2; d <= 3; ++d)
          for (int e = 2; e <= 3; ++e)
            for (int f = 2; f <= 3; ++f) {
              star -= 0.25 * val(inv0[c][e]) *
                      (d1(G0[d][e], ed(a)) + d1(G0[a][e], ed(d)) -
                       d1(G0[a][d], ed(e))) *
                      val(inv0[d][f]) *
                      (d1(G0[b][f], ed(c)) + d1(G0[c][f], ed(b)) -
                       d1(G0[c][b], ed(f)));
            }
      out.star_ab[a - 2][b - 2] = star;

      double r = 0.0;
      r -= val(i01) * d2v(G0[a][b], 4, TH);
      for (int c = 2; c <= 3; ++c)
        for (int d = 2; d <= 3; ++d) {
          const double icd = val(inv0[c][d]);
          r += 0.5 * val(i01) * icd *
               (d1(G0[a][c], TH) * d1(G0[b][d], 4) +
                d1(G0[a][c], 4) * d1(G0[b][d], TH));
          r -= 0.25 * val(i01) * icd *
               (d1(G0[c][d], 4) * d1(G0[a][b], TH) +
                d1(G0[c][d], TH) * d1(G0[a][b], 4));
        }
      r += star;
      const double brace_th = p01_th.v + 0.5 * w23_th.v;
      for (int c = 2; c <= 3; ++c) {
        const double p01c = val(i01) * d1(G0[0][1], ed(c));
        const double brace_c = p01c + 0.5 * w23(ed(c)).v;
        {
          const D z = vview(up0[c]) * dview(G0[a][b], TH);
          r += 0.5 * z.d[ed(c)];
          r += 0.5 * z.v * brace_c;
        }
        {
          const D z = vview(up0[c]) * dview(G0[a][b], ed(c));
          r += 0.5 * z.d[TH];
          r += 0.5 * z.v * brace_th;
        }
        {
          const D z = vview(i01) * vview(G0[a][c]) * dview(mix1[c], ed(b));
          r += 0.5 * z.d[TH];
          r += 0.5 * z.v * brace_th;
        }
        {
          const D z = vview(i01) * vview(G0[b][c]) * dview(mix1[c], ed(a));
          r += 0.5 * z.d[TH];
          r += 0.5 * z.v * brace_th;
        }
      }
      for (int c = 2; c <= 3; ++c)
        for (int d = 2; d <= 3; ++d) {
          const double icd = val(inv0[c][d]);
          r -= 0.5 * val(i01) * icd * d1(G0[a][c], TH) * d1(G1[1][b], ed(d));
          r -= 0.5 * val(i01) * icd * d1(G0[b][c], TH) * d1(G1[1][a], ed(d));
          for (int e = 2; e <= 3; ++e) {
            r += 0.5 * icd * val(up0[e]) * d1(G0[a][c], TH) *
                 (d1(G0[b][e], ed(d)) - d1(G0[b][d], ed(e)));
            r += 0.5 * icd * val(up0[e]) * d1(G0[b][c], TH) *
                 (d1(G0[a][e], ed(d)) - d1(G0[a][d], ed(e)));
          }
        }
      {
        DD kdd(0.0);
        for (int c = 2; c <= 3; ++c) kdd += low0[c] * up0[c];
        const D z = vview(kdd) * dview(G0[a][b], TH);
        r -= 0.5 * z.d[TH];
        r -= z.v * brace_th;
        for (int c = 2; c <= 3; ++c)
          for (int d = 2; d <= 3; ++d) {
            r += 0.5 * val(kdd) * val(inv0[c][d]) * d1(G0[a][c], TH) *
                 d1(G0[b][d], TH);
          }
      }
      {
        double aa = 0.0, bb = 0.0;
        for (int c = 2; c <= 3; ++c) {
          aa += val(i01) * val(G0[a][c]) * d1(mix1[c], TH);
          bb += val(i01) * val(G0[b][c]) * d1(mix1[c], TH);
        }
        r -= 0.5 * aa * bb;
      }
      out.r2_ab[a - 2][b - 2] = r;
    }

  return out;
}

ZeroPatternReport check_zero_pattern(const RicciOrders& r, bool plane_polarized,
                                     double tol) {
  ZeroPatternReport rep;
  auto visit = [&](const Mat4& mat, const char* order,
                   const std::vector<std::pair<int, int>>& nonzero) {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        bool allowed = false;
        for (const auto& [na, nb] : nonzero) {
          if ((a == na && b == nb) || (a == nb && b == na)) allowed = true;
        }
        if (allowed) continue;
        const double mag = std::abs(mat[a][b]);
        if (mag > rep.worst) {
          rep.worst = mag;
          rep.worst_component = std::string(order) + "_" + std::to_string(a) +
                                std::to_string(b);
        }
        if (mag > tol) rep.ok = false;
      }
  };
  visit(r.r4, "r4", {{0, 0}});
  if (plane_polarized) {
    visit(r.r3, "r3", {{0, 0}, {0, 2}});
    visit(r.r2, "r2",
          {{0, 0}, {0, 1}, {0, 2}, {2, 2}, {3, 3}});
  } else {
    visit(r.r3, "r3", {{0, 0}, {0, 2}, {0, 3}});
    visit(r.r2, "r2",
          {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {2, 2}, {2, 3}, {3, 3}});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// metric assembly

namespace {

Dual2<3> dual3_of(const Jet2<3>& j) {
  Dual2<3> x;
  x.v.v = j.val;
  for (int i = 0; i < 3; ++i) {
    x.v.d[i] = j.g[i];
    x.d[i].v = j.g[i];
    for (int k = 0; k < 3; ++k) x.d[i].d[k] = j.h[i][k];
  }
  return x;
}

// embed a (theta, eta, v) jet into the 7 expansion variables:
// theta -> 0, eta -> eta2 (1), v -> x1 (4)
Jet2<7> embed37(const Jet2<3>& j) {
  constexpr int map[3] = {0, 1, 4};
  Jet2<7> out{};
  out.val = j.val;
  for (int i = 0; i < 3; ++i) {
    out.g[map[i]] = j.g[i];
    for (int k = 0; k < 3; ++k) out.h[map[i]][map[k]] = j.h[i][k];
  }
  return out;
}

Jet2<7> jet37(const Dual2<3>& x) { return embed37(to_jet<3>(x)); }

struct Trig7 {
  struct Wave {
    double amp = 0.0;
    std::array<double, 7> k{};
    double phase = 0.0;
  };
  double constant = 0.0;
  std::vector<Wave> waves;

  Jet2<7> eval(const ExpansionPoint& p) const {
    const std::array<double, 7> c = {p.theta, p.eta2, p.eta3, p.x[0],
                                     p.x[1],   p.x[2], p.x[3]};
    std::array<Dual2<7>, 7> xs;
    for (int i = 0; i < kVars; ++i) xs[i] = seed2<7>(c[i], i);
    Dual2<7> acc(constant);
    for (const auto& w : waves) {
      Dual2<7> arg(w.phase);
      for (int i = 0; i < kVars; ++i) arg += w.k[i] * xs[i];
      acc += w.amp * sin(arg);
    }
    return to_jet<7>(acc);
  }
};

Trig7 random_trig7(std::mt19937_64& rng, double amplitude, double constant,
                   double k_max = 0.8, int n_waves = 2) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  Trig7 t;
  t.constant = constant;
  t.waves.resize(n_waves);
  double total = 0.0;
  for (auto& w : t.waves) {
    w.amp = 0.3 + std::abs(unit(rng));
    for (int i = 0; i < kVars; ++i) w.k[i] = k_max * unit(rng);
    w.phase = angle(rng);
    total += w.amp;
  }
  for (auto& w : t.waves) w.amp *= amplitude / total;
  return t;
}

}  // namespace

MetricExpansion plane_polarized_metric(const AnalyticFieldSet& f) {
  AnalyticFieldSet ff = f;
  if (!ff.T) ff.T = zero_field();
  if (!ff.U || !ff.V || !ff.M || !ff.Y) {
    throw ConfigError("plane_polarized_metric: incomplete field set");
  }

  MetricExpansion m;
  m.du = {1.0, 0.0, 0.0, 0.0};
  m.dy = {{{0, 0, 1, 0}, {0, 0, 0, 1}}};

  m.g0 = [ff](const ExpansionPoint& p) {
    Sym4Jet out{};
    const Dual2<3> u = dual3_of(ff.U.jet(p.theta, p.eta2, p.x[1]));
    const Dual2<3> v = dual3_of(ff.V.jet(p.theta, p.eta2, p.x[1]));
    const Dual2<3> mm = dual3_of(ff.M.jet(p.theta, p.eta2, p.x[1]));
    out[0][1] = out[1][0] = jet37(-exp(-mm));
    out[2][2] = jet37(exp(v - u));
    out[3][3] = jet37(exp(-(u + v)));
    return out;
  };
  m.g1 = [ff](const ExpansionPoint& p) {
    Sym4Jet out{};
    const Dual2<3> mm = dual3_of(ff.M.jet(p.theta, p.eta2, p.x[1]));
    const Dual2<3> y = dual3_of(ff.Y.jet(p.theta, p.eta2, p.x[1]));
    out[1][2] = out[2][1] = jet37(exp(-mm) * y);
    return out;
  };
  m.g2 = [ff](const ExpansionPoint& p) {
    Sym4Jet out{};
    const Dual2<3> mm = dual3_of(ff.M.jet(p.theta, p.eta2, p.x[1]));
    const Dual2<3> t = dual3_of(ff.T.jet(p.theta, p.eta2, p.x[1]));
    out[1][1] = jet37(exp(-mm) * t);
    return out;
  };
  return m;
}

MetricExpansion random_metric(std::mt19937_64& rng, double amplitude,
                              bool randomize_phases) {
  struct Slots {
    Trig7 g0_01, g0_22, g0_33, g0_23;
    Trig7 g1_12, g1_13, g1_22, g1_23, g1_33;
    Trig7 g2_11, g2_12, g2_13, g2_22, g2_23, g2_33;
  };
  auto slots = std::make_shared<Slots>();
  slots->g0_01 = random_trig7(rng, amplitude, -1.0);
  slots->g0_22 = random_trig7(rng, amplitude, 1.0);
  slots->g0_33 = random_trig7(rng, amplitude, 1.0);
  slots->g0_23 = random_trig7(rng, 0.5 * amplitude, 0.0);
  slots->g1_12 = random_trig7(rng, amplitude, 0.0);
  slots->g1_13 = random_trig7(rng, amplitude, 0.0);
  slots->g1_22 = random_trig7(rng, amplitude, 0.0);
  slots->g1_23 = random_trig7(rng, amplitude, 0.0);
  slots->g1_33 = random_trig7(rng, amplitude, 0.0);
  slots->g2_11 = random_trig7(rng, amplitude, 0.0);
  slots->g2_12 = random_trig7(rng, amplitude, 0.0);
  slots->g2_13 = random_trig7(rng, amplitude, 0.0);
  slots->g2_22 = random_trig7(rng, amplitude, 0.0);
  slots->g2_23 = random_trig7(rng, amplitude, 0.0);
  slots->g2_33 = random_trig7(rng, amplitude, 0.0);

  MetricExpansion m;
  if (randomize_phases) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    m.du = {1.0, 0.2 * unit(rng), 0.15 * unit(rng), 0.15 * unit(rng)};
    m.dy = {{{0.1 * unit(rng), 0.1 * unit(rng), 1.0, 0.15 * unit(rng)},
             {0.1 * unit(rng), 0.1 * unit(rng), 0.15 * unit(rng), 1.0}}};
  }
  m.g0 = [slots](const ExpansionPoint& p) {
    Sym4Jet out{};
    out[0][1] = out[1][0] = slots->g0_01.eval(p);
    out[2][2] = slots->g0_22.eval(p);
    out[3][3] = slots->g0_33.eval(p);
    out[2][3] = out[3][2] = slots->g0_23.eval(p);
    return out;
  };
  m.g1 = [slots](const ExpansionPoint& p) {
    Sym4Jet out{};
    out[1][2] = out[2][1] = slots->g1_12.eval(p);
    out[1][3] = out[3][1] = slots->g1_13.eval(p);
    out[2][2] = slots->g1_22.eval(p);
    out[2][3] = out[3][2] = slots->g1_23.eval(p);
    out[3][3] = slots->g1_33.eval(p);
    return out;
  };
  m.g2 = [slots](const ExpansionPoint& p) {
    Sym4Jet out{};
    out[1][1] = slots->g2_11.eval(p);
    out[1][2] = out[2][1] = slots->g2_12.eval(p);
    out[1][3] = out[3][1] = slots->g2_13.eval(p);
    out[2][2] = slots->g2_22.eval(p);
    out[2][3] = out[3][2] = slots->g2_23.eval(p);
    out[3][3] = slots->g2_33.eval(p);
    return out;
  };
  return m;
}

ReducedMatchReport reduced_equation_match(const AnalyticFieldSet& fields,
                                          double theta, double eta, double v,
                                          double zero_tol) {
  const MetricExpansion m = plane_polarized_metric(fields);
  ExpansionPoint p;
  p.theta = theta;
  p.eta2 = eta;
  p.x[1] = v;
  const RicciOrders r = ricci_orders(m, p);
  const EinsteinResiduals res = einstein_residuals(fields, theta, eta, v);

  ReducedMatchReport rep;
  rep.zero_tol = zero_tol;
  const std::array<std::pair<const char*, std::pair<double, double>>, 5> rows =
      {{{"R4_00", {r.r4[0][0], res.eq1}},
        {"R3_02", {r.r3[0][2], res.eq2}},
        {"R2_01", {r.r2[0][1], res.eq3}},
        {"R2_22", {r.r2[2][2], res.eq4}},
        {"R2_33", {r.r2[3][3], res.eq5}}}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ReducedMatchEntry& e = rep.entries[i];
    e.component = rows[i].first;
    e.ricci = rows[i].second.first;
    e.residual = rows[i].second.second;
    e.ricci_zero = std::abs(e.ricci) < zero_tol;
    e.residual_zero = std::abs(e.residual) < zero_tol;
    e.ratio = (!e.ricci_zero && !e.residual_zero) ? e.ricci / e.residual : 0.0;
  }
  return rep;
}

}  // namespace gwd
