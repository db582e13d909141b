#include "gwd/classify.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "gwd/error.hpp"

namespace gwd {

void validate_symmetries(const VariationalSystem& sys, std::uint64_t seed,
                         double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> g(sys.m);
  for (int probe = 0; probe < 5; ++probe) {
    for (auto& x : g) x = unit(rng);
    for (int a = 0; a <= sys.d; ++a)
      for (int b = 0; b <= sys.d; ++b)
        for (int p = 0; p < sys.m; ++p)
          for (int q = 0; q < sys.m; ++q) {
            const double base = sys.A(g, a, b, p, q);
            if (std::abs(base - sys.A(g, b, a, p, q)) > tol ||
                std::abs(base - sys.A(g, a, b, q, p)) > tol) {
              throw ConfigError("variational system violates A symmetries");
            }
          }
  }
}

MatrixD eikonal_matrix(const VariationalSystem& sys,
                       std::span<const double> g0,
                       std::span<const double> du) {
  if (static_cast<int>(du.size()) != sys.d + 1) {
    throw ConfigError("eikonal_matrix: du dimension mismatch");
  }
  if (static_cast<int>(g0.size()) != sys.m) {
    throw ConfigError("eikonal_matrix: g0 dimension mismatch");
  }
  double norm = 0.0;
  for (double x : du) norm += x * x;
  if (norm == 0.0) throw ConfigError("eikonal_matrix: du must be nonzero");

  MatrixD c(sys.m, std::vector<double>(sys.m, 0.0));
  for (int p = 0; p < sys.m; ++p)
    for (int q = 0; q < sys.m; ++q) {
      double acc = 0.0;
      for (int a = 0; a <= sys.d; ++a)
        for (int b = 0; b <= sys.d; ++b) {
          acc += du[a] * du[b] * sys.A(g0, a, b, p, q);
        }
      c[p][q] = acc;
    }
  return c;
}

CharacteristicData null_space(const MatrixD& c, double tol) {
  const int m = static_cast<int>(c.size());
  Eigen::MatrixXd mat(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) mat(i, j) = c[i][j];
  if (!mat.isApprox(mat.transpose(), 1e-12)) {
    throw ConfigError("null_space: matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mat);
  const Eigen::VectorXd vals = eig.eigenvalues();
  const double scale = vals.cwiseAbs().maxCoeff();

  CharacteristicData out;
  out.c = c;
  for (int i = 0; i < m; ++i) {
    if (std::abs(vals(i)) <= tol * std::max(scale, 1e-300)) {
      std::vector<double> v(m);
      for (int j = 0; j < m; ++j) v[j] = eig.eigenvectors()(j, i);
      out.null_basis.push_back(std::move(v));
    }
  }
  if (scale == 0.0) {  // the zero matrix: whole space
    out.null_basis.clear();
    for (int i = 0; i < m; ++i) {
      std::vector<double> v(m, 0.0);
      v[i] = 1.0;
      out.null_basis.push_back(std::move(v));
    }
  }
  out.multiplicity = static_cast<int>(out.null_basis.size());
  return out;
}

std::vector<double> lambda_tensor(
    const VariationalSystem& sys, std::span<const double> g0,
    std::span<const double> du,
    const std::vector<std::vector<double>>& basis) {
  if (basis.empty()) throw ConfigError("lambda_tensor: empty null basis");
  const int n = static_cast<int>(basis.size());
  const int m = sys.m;

  // contract dA over (a, b) with du first
  std::vector<double> duA(static_cast<std::size_t>(m) * m * m, 0.0);
  for (int q = 0; q < m; ++q)
    for (int r = 0; r < m; ++r)
      for (int p = 0; p < m; ++p) {
        double acc = 0.0;
        for (int a = 0; a <= sys.d; ++a)
          for (int b = 0; b <= sys.d; ++b) {
            acc += du[a] * du[b] * sys.dA(g0, a, b, q, r, p);
          }
        duA[(static_cast<std::size_t>(q) * m + r) * m + p] = acc;
      }

  std::vector<double> lam(static_cast<std::size_t>(n) * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int p = 0; p < m; ++p)
          for (int q = 0; q < m; ++q)
            for (int r = 0; r < m; ++r) {
              acc += duA[(static_cast<std::size_t>(q) * m + r) * m + p] *
                     basis[i][p] * basis[j][q] * basis[k][r];
            }
        lam[(static_cast<std::size_t>(i) * n + j) * n + k] = acc;
      }
  return lam;
}

TransportCoefficients transport_coefficients(const VariationalSystem& sys,
                                             const TransportFields& fields,
                                             std::span<const double> point) {
  if (!fields.g0 || !fields.du || !fields.r) {
    throw ConfigError("transport_coefficients: incomplete fields");
  }
  const int dim = sys.d + 1;
  if (static_cast<int>(point.size()) != dim) {
    throw ConfigError("transport_coefficients: point dimension mismatch");
  }

  auto at = [&](int seed_dir) {
    std::vector<Dual1<1>> x(dim);
    for (int i = 0; i < dim; ++i) x[i] = Dual1<1>(point[i]);
    if (seed_dir >= 0) x[seed_dir].d[0] = 1.0;
    return x;
  };

  const std::vector<Dual1<1>> x0 = at(-1);
  const std::vector<Dual1<1>> g0d = fields.g0(x0);
  const std::vector<Dual1<1>> dud = fields.du(x0);
  const std::vector<Dual1<1>> rd = fields.r(x0);
  std::vector<double> g0(sys.m), du(dim), r(sys.m);
  for (int i = 0; i < sys.m; ++i) g0[i] = g0d[i].v;
  for (int i = 0; i < dim; ++i) du[i] = dud[i].v;
  for (int i = 0; i < sys.m; ++i) r[i] = rd[i].v;

  TransportCoefficients out;
  out.ray.assign(dim, 0.0);
  for (int a = 0; a < dim; ++a) {
    double acc = 0.0;
    for (int b = 0; b < dim; ++b)
      for (int p = 0; p < sys.m; ++p)
        for (int q = 0; q < sys.m; ++q) {
          acc += 2.0 * du[b] * sys.A(g0, a, b, p, q) * r[p] * r[q];
        }
    out.ray[a] = acc;
  }

  // divergence term: d/dx^a { u_b A^{ab}_{pq}(g0(x)) R^p R^q }
  double div = 0.0;
  for (int a = 0; a < dim; ++a) {
    const std::vector<Dual1<1>> xs = at(a);
    const std::vector<Dual1<1>> g0x = fields.g0(xs);
    const std::vector<Dual1<1>> dux = fields.du(xs);
    const std::vector<Dual1<1>> rx = fields.r(xs);
    Dual1<1> acc(0.0);
    for (int b = 0; b < dim; ++b)
      for (int p = 0; p < sys.m; ++p)
        for (int q = 0; q < sys.m; ++q) {
          acc += dux[b] * sys.A_dual(g0x, a, b, p, q) * rx[p] * rx[q];
        }
    div += acc.d[0];
  }

  // - u_a dA^{ab}_{qr}/dg^p dg0^r/dx^b R^p R^q
  double grad_term = 0.0;
  for (int b = 0; b < dim; ++b) {
    const std::vector<Dual1<1>> xs = at(b);
    const std::vector<Dual1<1>> g0x = fields.g0(xs);
    for (int a = 0; a < dim; ++a)
      for (int p = 0; p < sys.m; ++p)
        for (int q = 0; q < sys.m; ++q)
          for (int rr = 0; rr < sys.m; ++rr) {
            grad_term += du[a] * sys.dA(g0, a, b, q, rr, p) * g0x[rr].d[0] *
                         r[p] * r[q];
          }
  }
  out.n = div - grad_term;
  return out;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::LinearlyDegenerate: return "linearly degenerate";
    case Verdict::GenuinelyNonlinearCandidate:
      return "genuinely nonlinear candidate";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

ClassificationReport classify_characteristic(
    const VariationalSystem& sys, std::span<const SamplePoint> samples,
    double tol) {
  if (samples.empty()) {
    throw ConfigError("classify_characteristic: no samples");
  }
  ClassificationReport rep;
  bool all_zero = true;
  bool all_nonzero_simple = true;
  int used = 0;
  for (const SamplePoint& s : samples) {
    SampleResult res;
    res.point = s;
    const MatrixD c = eikonal_matrix(sys, s.g0, s.du);
    const CharacteristicData ch = null_space(c, tol);
    res.multiplicity = ch.multiplicity;
    res.characteristic = ch.multiplicity > 0;
    if (!res.characteristic) {
      ++rep.rejected;
      rep.samples.push_back(std::move(res));
      continue;
    }
    const std::vector<double> lam = lambda_tensor(sys, s.g0, s.du, ch.null_basis);
    for (double x : lam) res.max_abs_lambda = std::max(res.max_abs_lambda, std::abs(x));
    if (res.max_abs_lambda > tol) all_zero = false;
    if (res.max_abs_lambda <= tol || ch.multiplicity > 1) {
      all_nonzero_simple = false;
    }
    ++used;
    rep.samples.push_back(std::move(res));
  }
  if (used == 0) {
    throw ConfigError("classify_characteristic: no characteristic samples");
  }
  if (all_zero) {
    rep.verdict = Verdict::LinearlyDegenerate;
  } else if (all_nonzero_simple) {
    rep.verdict = Verdict::GenuinelyNonlinearCandidate;
  } else {
    rep.verdict = Verdict::Indeterminate;
  }
  return rep;
}

namespace {

template <class S>
S poly_eval(const std::vector<double>& coeffs, const S& x) {
  S acc(0.0);
  for (std::size_t i = coeffs.size(); i-- > 0;) {
    acc = acc * x + coeffs[i];
  }
  return acc;
}

}  // namespace

VariationalSystem scalar_wave_system(int d, std::vector<double> c_poly) {
  auto f = [d, c_poly](auto g, int a, int b, int p, int q) {
    using S = std::remove_cvref_t<decltype(g[0])>;
    (void)p;
    (void)q;
    if (a != b) return S(0.0);
    if (a == 0) return S(0.5);
    const S c = poly_eval(c_poly, g[0]);
    return S(-0.5) * c * c;
  };
  return make_system(d, 1, f);
}

VariationalSystem two_component_degenerate_system(int d, double c0) {
  auto f = [d, c0](auto g, int a, int b, int p, int q) {
    using S = std::remove_cvref_t<decltype(g[0])>;
    (void)g;
    if (a != b || p != q) return S(0.0);
    if (a == 0) return S(0.5);
    return S(-0.5 * c0 * c0);
  };
  return make_system(d, 2, f);
}

std::vector<double> scalar_wave_characteristic(std::span<const double> c_poly,
                                               double g0,
                                               std::span<const double> k) {
  std::vector<double> coeffs(c_poly.begin(), c_poly.end());
  const double c = poly_eval(coeffs, g0);
  double norm = 0.0;
  for (double x : k) norm += x * x;
  std::vector<double> du(k.size() + 1);
  du[0] = c * std::sqrt(norm);
  for (std::size_t i = 0; i < k.size(); ++i) du[i + 1] = k[i];
  return du;
}

}  // namespace gwd
