#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <vector>

#include "gwd/error.hpp"
#include "gwd/grid.hpp"
#include "gwd/snapshot.hpp"

using namespace gwd;

TEST_CASE("build_grid uniform spacing") {
  const Grid3 g = build_grid({0, 1}, {-1, 1}, {0, 2}, 3, 3, 3);
  CHECK(g.d_theta == 0.5);
  CHECK(g.d_eta == 1.0);
  CHECK(g.d_v == 1.0);
  CHECK(g.theta(2) == 1.0);
  CHECK(g.eta(0) == -1.0);

  const Grid3 two = build_grid({0, 1}, {0, 1}, {0, 1}, 2, 2, 2);
  CHECK(two.d_theta == 1.0);
}

TEST_CASE("build_grid rejects bad input") {
  CHECK_THROWS_AS(build_grid({0, 0}, {0, 1}, {0, 1}, 3, 3, 3), ConfigError);
  CHECK_THROWS_AS(build_grid({1, 0}, {0, 1}, {0, 1}, 3, 3, 3), ConfigError);
  CHECK_THROWS_AS(build_grid({0, 1}, {0, 1}, {0, 1}, 1, 3, 3), ConfigError);
}

TEST_CASE("grid function validation") {
  const Grid3 g = build_grid({0, 1}, {0, 1}, {0, 1}, 4, 2, 2);
  GridFunction f(g, 1.0);
  CHECK_NOTHROW(f.validate("f"));
  f(0, 0, 0) = std::nan("");
  CHECK_THROWS_AS(f.validate("f"), ConfigError);
}

TEST_CASE("diff of constant is exactly zero") {
  const Grid3 g = build_grid({0, 1}, {0, 2}, {0, 1}, 9, 7, 5);
  GridFunction f(g, 3.25);
  for (Axis ax : {Axis::Theta, Axis::Eta, Axis::V}) {
    const GridFunction d = diff(f, ax, 1);
    CHECK(d.max_abs() == 0.0);
  }
}

TEST_CASE("second derivative exact on quadratics") {
  const Grid3 g = build_grid({0, 1}, {0, 1}, {0, 1}, 11, 2, 2);
  GridFunction f(g);
  for (int k = 0; k < g.n_v; ++k)
    for (int j = 0; j < g.n_eta; ++j)
      for (int i = 0; i < g.n_theta; ++i) f(i, j, k) = g.theta(i) * g.theta(i);
  const GridFunction d2 = diff(f, Axis::Theta, 2);
  for (int i = 0; i < g.n_theta; ++i) {
    CHECK(d2(i, 0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("diff converges at order 2 against the closed-form derivative") {
  std::vector<double> spacings, errors;
  for (int n : {11, 21, 41}) {
    const Grid3 g = build_grid({0, 1}, {0, 1}, {0, 1}, n, 2, 2);
    GridFunction f(g);
    for (int k = 0; k < g.n_v; ++k)
      for (int j = 0; j < g.n_eta; ++j)
        for (int i = 0; i < g.n_theta; ++i) f(i, j, k) = std::sin(g.theta(i));
    const GridFunction d = diff(f, Axis::Theta, 1);
    double err = 0.0;
    for (int i = 0; i < g.n_theta; ++i) {
      err = std::max(err, std::abs(d(i, 0, 0) - std::cos(g.theta(i))));
    }
    spacings.push_back(g.d_theta);
    errors.push_back(err);
  }
  const ConvergenceReport rep = estimate_order(spacings, errors);
  CHECK(rep.observed_order == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("diff is linear") {
  const Grid3 g = build_grid({0, 1}, {0, 1}, {0, 1}, 9, 6, 5);
  GridFunction f(g), h(g);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1, 1);
  for (double& x : f.values()) x = unit(rng);
  for (double& x : h.values()) x = unit(rng);
  const double a = 1.7, b = -0.4;

  GridFunction combo(g);
  for (std::size_t n = 0; n < combo.values().size(); ++n) {
    combo.values()[n] = a * f.values()[n] + b * h.values()[n];
  }
  const GridFunction lhs = diff(combo, Axis::Eta, 1);
  const GridFunction df = diff(f, Axis::Eta, 1);
  const GridFunction dh = diff(h, Axis::Eta, 1);
  double worst = 0.0;
  for (std::size_t n = 0; n < lhs.values().size(); ++n) {
    worst = std::max(worst, std::abs(lhs.values()[n] - a * df.values()[n] -
                                     b * dh.values()[n]));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("periodic stencils wrap") {
  Grid3 g = build_grid({0, 1}, {0, 1}, {0, 1}, 8, 2, 2);
  g.d_theta = 6.283185307179586 / 8;  // one period, no duplicate endpoint
  GridFunction f(g);
  for (int k = 0; k < g.n_v; ++k)
    for (int j = 0; j < g.n_eta; ++j)
      for (int i = 0; i < g.n_theta; ++i) f(i, j, k) = std::sin(g.theta(i));
  const GridFunction d = diff(f, Axis::Theta, 1, BoundaryMode::Periodic);
  // centered periodic stencil of sin(k theta) has no boundary artifacts
  for (int i = 0; i < g.n_theta; ++i) {
    CHECK(std::abs(d(i, 0, 0) - std::cos(g.theta(i))) < 0.12);
  }
}

TEST_CASE("estimate_order recovers exact power laws") {
  const std::vector<double> h{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> e2, e1;
  for (double x : h) {
    e2.push_back(3.0 * x * x);
    e1.push_back(0.7 * x);
  }
  CHECK(estimate_order(h, e2).observed_order == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(estimate_order(h, e1).observed_order == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("estimate_order hand-computed example") {
  const std::vector<double> h{0.1, 0.05, 0.025};
  const std::vector<double> e{1e-2, 2.5e-3, 6.25e-4};
  CHECK(estimate_order(h, e).observed_order == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("estimate_order edge cases") {
  const std::vector<double> h2{0.1, 0.05};
  const std::vector<double> e2{1.0, 0.5};
  CHECK_THROWS_AS(estimate_order(h2, e2), ConfigError);

  const std::vector<double> hdup{0.1, 0.1, 0.05};
  const std::vector<double> e3{1.0, 0.5, 0.25};
  CHECK_THROWS_AS(estimate_order(hdup, e3), ConfigError);

  const std::vector<double> h3{0.1, 0.05, 0.025};
  const std::vector<double> ez{1e-3, 0.0, 1e-5};
  CHECK(std::isinf(estimate_order(h3, ez).observed_order));
}

TEST_CASE("trapezoid integration exact on linear integrands") {
  const Grid3 g = build_grid({0, 1}, {0, 2}, {0, 1}, 5, 4, 3);
  GridFunction f(g);
  for (int k = 0; k < g.n_v; ++k)
    for (int j = 0; j < g.n_eta; ++j)
      for (int i = 0; i < g.n_theta; ++i) {
        f(i, j, k) = 2.0 + g.theta(i) - 0.5 * g.eta(j) + g.v(k);
      }
  // integral over [0,1]x[0,2]x[0,1] of 2 + th - eta/2 + v = 2*2 + 1 - 1 + 1
  CHECK(integrate(f) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("snapshot round trip and determinism") {
  const Grid3 g = build_grid({0, 1}, {-1, 1}, {0, 1}, 4, 3, 2);
  GridFunction f(g);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(-1, 1);
  for (double& x : f.values()) x = unit(rng);

  const std::string path = "snapshot_test.csv";
  write_snapshot(f, "U", path);
  const Snapshot back = read_snapshot(path);
  CHECK(back.field_name == "U");
  CHECK(back.field.grid().same_layout(g));
  for (std::size_t n = 0; n < f.values().size(); ++n) {
    CHECK(back.field.values()[n] == f.values()[n]);
  }

  std::ifstream first(path, std::ios::binary);
  std::string bytes1((std::istreambuf_iterator<char>(first)), {});
  write_snapshot(f, "U", path);
  std::ifstream second(path, std::ios::binary);
  std::string bytes2((std::istreambuf_iterator<char>(second)), {});
  CHECK(bytes1 == bytes2);
}
