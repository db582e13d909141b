#include <doctest.h>

#include <cmath>

#include "gwd/error.hpp"
#include "gwd/fields.hpp"
#include "gwd/go_solvers.hpp"
#include "gwd/manufactured.hpp"

using namespace gwd;

TEST_CASE("diffraction coefficient: plane case of the 2d wave equation") {
  // u = (t - x)/sqrt(2), y = y, c0 = 1
  const double s = 1.0 / std::sqrt(2.0);
  const std::vector<double> du{s, -s, 0.0};
  const std::vector<double> dy{0.0, 0.0, 1.0};
  const DiffractionResult r = diffraction_coefficient(du, dy, 1.0);
  CHECK(r.d == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(r.ray_invariance_defect == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("diffraction coefficient: degenerate and scaled cases") {
  const std::vector<double> du{1.0, 0.0, 0.0};
  const std::vector<double> zero{0.0, 0.0, 0.0};
  CHECK(diffraction_coefficient(du, zero, 1.0).d == 0.0);

  const std::vector<double> dy{1.0, 0.0, 1.0, 0.0};
  const std::vector<double> du4{1.0, 0.0, 0.0, 0.0};
  CHECK(diffraction_coefficient(du4, dy, 2.0).d == doctest::Approx(-3.0));

  CHECK_THROWS_AS(diffraction_coefficient(du, dy, 1.0), ConfigError);
}

TEST_CASE("transport: zero coefficient keeps the amplitude") {
  const TransportResult r =
      solve_transport(2.5, [](double) { return 0.0; }, 1.0, 64);
  CHECK(r.amplitude.back() == 2.5);
  CHECK_FALSE(r.blew_up);
}

TEST_CASE("transport: constant coefficient decays exponentially") {
  const TransportResult r =
      solve_transport(1.0, [](double) { return 1.0; }, 1.0, 100);
  CHECK(std::abs(r.amplitude.back() - std::exp(-1.0)) < 1e-8);
}

TEST_CASE("transport: focusing coefficient grows and trips the cap") {
  auto n = [](double v) { return -1.0 / (1.0 - v); };
  const TransportResult fine = solve_transport(1.0, n, 0.9, 512, 1e6);
  // closed form A = 1/(1-v)
  CHECK(std::abs(fine.amplitude.back() - 10.0) < 1e-5);

  const TransportResult capped = solve_transport(1.0, n, 0.999, 4096, 1e2);
  CHECK(capped.blew_up);
  CHECK(capped.blowup_v > 0.98);
  CHECK(capped.blowup_v < 0.9995);
}

TEST_CASE("localized HS: zero coefficients give a v-independent solution") {
  const Grid3 g = hs_grid({0, 1}, 17, {0, 1}, 17);
  HsData data;
  data.at_v0 = [](double th) { return std::sin(3.0 * th); };
  data.at_theta0 = [](double) { return 0.0; };
  const WaveState w = solve_hs(data, constant_coefficients(0, 0, 0),
                               WaveformMode::Localized, g);
  for (int k = 0; k < g.n_v; ++k)
    for (int i = 0; i < g.n_theta; ++i) {
      CHECK(w.a(i, 0, k) == w.a(i, 0, 0));  // bitwise
    }
}

TEST_CASE("localized HS: exact ramp solution at second order") {
  // a = theta c0 / (1 + c0 v / 2) with c0 = 1; on [0,1]x[0,2] a(1,2) = 0.5
  const AnalyticField3 exact = make_field(
      [](auto th, auto, auto v) { return th / (1.0 + 0.5 * v); });
  std::vector<double> spacings, errors;
  for (int n : {17, 33, 65}) {
    const Grid3 g = hs_grid({0, 1}, n, {0, 2}, 2 * n - 1);
    HsData data;
    data.at_v0 = [](double th) { return th; };
    data.at_theta0 = [](double) { return 0.0; };
    const WaveState w = solve_hs(data, constant_coefficients(1.0, 0.0, 0.0),
                                 WaveformMode::Localized, g);
    spacings.push_back(g.d_theta);
    errors.push_back(max_error(w.a, exact));
    if (n == 65) {
      CHECK(w.a(g.n_theta - 1, 0, g.n_v - 1) == doctest::Approx(0.5).epsilon(1e-4));
    }
  }
  const double order = estimate_order(spacings, errors).observed_order;
  CHECK(order > 1.7);
  CHECK(order < 2.3);
}

TEST_CASE("periodic HS: the theta mean stays pinned at zero") {
  const double period = 6.283185307179586;
  const Grid3 g = hs_periodic_grid(period, 64, {0, 1}, 33);
  HsData data;
  data.at_v0 = [](double th) { return 0.1 * std::sin(th); };
  const WaveState w = solve_hs(data, constant_coefficients(1.0, 0.0, 0.0),
                               WaveformMode::Periodic, g);
  CHECK(w.period == doctest::Approx(period));
  for (int k = 0; k < g.n_v; ++k) {
    double mean = 0.0;
    for (int i = 0; i < g.n_theta; ++i) mean += w.a(i, 0, k);
    CHECK(std::abs(mean / g.n_theta) < 1e-12);
  }
}

TEST_CASE("periodic HS rejects data with nonzero mean and nonzero D") {
  const Grid3 g = hs_periodic_grid(6.283185307179586, 32, {0, 1}, 9);
  HsData data;
  data.at_v0 = [](double th) { return 0.1 * std::sin(th) + 0.05; };
  CHECK_THROWS_AS(solve_hs(data, constant_coefficients(1, 0, 0),
                           WaveformMode::Periodic, g),
                  ConfigError);

  HsData ok;
  ok.at_v0 = [](double th) { return 0.1 * std::sin(th); };
  CHECK_THROWS_AS(solve_hs(ok, constant_coefficients(0, 0, -1.0),
                           WaveformMode::Periodic, g),
                  ConfigError);
}

TEST_CASE("HS gradient blow-up is reported with its location") {
  // slope ODE along characteristics: w' = -w^2/2, so an initial slope of
  // -pi has |w| crossing 10 near v = 2 (1/pi - 1/10) = 0.44
  const Grid3 g = hs_grid({0, 1}, 129, {0, 1}, 129);
  HsData data;
  data.at_v0 = [](double th) { return 0.5 * std::sin(6.283185307179586 * th); };
  data.at_theta0 = [](double) { return 0.0; };
  WaveOptions opt;
  opt.gradient_cap = 10.0;
  try {
    solve_hs(data, constant_coefficients(1.0, 0.0, 0.0),
             WaveformMode::Localized, g, opt);
    FAIL("expected gradient blow-up");
  } catch (const SolverFailure& e) {
    CHECK(e.kind == SolverFailure::Kind::GradientBlowup);
    CHECK(e.v > 0.3);
    CHECK(e.v < 0.64);
  }
}

TEST_CASE("diffractive solver matches the HS solver on eta-independent data") {
  const Grid3 g2 = hs_grid({0, 1}, 33, {0, 1}, 33);
  HsData hs_data;
  hs_data.at_v0 = [](double th) { return 0.3 * std::sin(2.0 * th); };
  hs_data.at_theta0 = [](double v) { return 0.1 * v; };
  const WaveState hs = solve_hs(hs_data, constant_coefficients(1.0, 0.2, 0.0),
                                WaveformMode::Localized, g2);

  const Grid3 g3 = build_grid({0, 1}, {-1, 1}, {0, 1}, 33, 7, 33);
  DiffractiveData d3;
  d3.at_v0 = [&](double th, double) { return hs_data.at_v0(th); };
  d3.at_theta0 = [&](double, double v) { return hs_data.at_theta0(v); };
  const WaveState dw = solve_diffractive(
      d3, constant_coefficients(1.0, 0.2, -1.0), g3);

  double worst = 0.0;
  for (int k = 0; k < g3.n_v; ++k)
    for (int l = 0; l < g3.n_eta; ++l)
      for (int i = 0; i < g3.n_theta; ++i) {
        worst = std::max(worst, std::abs(dw.a(i, l, k) - hs.a(i, 0, k)));
      }
  CHECK(worst < 1e-12);
}

TEST_CASE("diffractive solver: decoupled characteristics when D = 0") {
  // a_{theta v} = 0: a = F(theta) + G(v), fixed by the two data faces
  const Grid3 g = build_grid({0, 1}, {0, 1}, {0, 1}, 17, 5, 17);
  auto F = [](double th) { return std::sin(2.0 * th); };
  auto G = [](double v) { return 0.5 * v * v; };
  DiffractiveData data;
  data.at_v0 = [&](double th, double) { return F(th) + G(0.0); };
  data.at_theta0 = [&](double, double v) { return F(0.0) + G(v); };
  const WaveState w =
      solve_diffractive(data, constant_coefficients(0, 0, 0), g);
  double worst = 0.0;
  for (int k = 0; k < g.n_v; ++k)
    for (int l = 0; l < g.n_eta; ++l)
      for (int i = 0; i < g.n_theta; ++i) {
        worst = std::max(worst, std::abs(w.a(i, l, k) - F(g.theta(i)) -
                                         G(g.v(k))));
      }
  CHECK(worst < 1e-13);
}

TEST_CASE("diffractive solver enforces the step-ratio bound") {
  const Grid3 g = build_grid({0, 1}, {0, 1}, {0, 1}, 9, 65, 9);  // tiny h_eta
  DiffractiveData data;
  data.at_v0 = [](double, double) { return 0.0; };
  data.at_theta0 = [](double, double) { return 0.0; };
  CHECK_THROWS_AS(
      solve_diffractive(data, constant_coefficients(0, 0, -1.0), g),
      ConfigError);
}

TEST_CASE("manufactured diffractive solution converges at second order") {
  // eta-periodic exact solution on [0, 2pi); v refined quadratically against
  // eta to keep the step-ratio bound satisfied along the ladder
  const AnalyticField3 exact = make_field([](auto th, auto et, auto v) {
    return 0.4 * sin(1.3 * th + 0.4) * cos(et) + 0.2 * sin(0.9 * v + 2.0 * et);
  });
  const double lambda = 1.0, ncoef = 0.3, dcoef = -1.0;
  auto source = [&](double th, double et, double v) {
    const Jet2<3> j = exact.jet(th, et, v);
    return j.h[0][2] + 0.5 * lambda * j.g[0] * j.g[0] +
           lambda * j.val * j.h[0][0] + ncoef * j.g[0] + 0.5 * dcoef * j.h[1][1];
  };

  std::vector<double> spacings, errors;
  for (int t = 0; t < 3; ++t) {
    const int n_t = 16 * (1 << t) + 1;
    const int n_e = 8 * (1 << t);
    const int n_v = 16 * (1 << (2 * t)) + 1;
    Grid3 g = build_grid({0, 1}, {0, 1}, {0, 1}, n_t, 2, n_v);
    g.n_eta = n_e;
    g.d_eta = 6.283185307179586 / n_e;
    DiffractiveData data;
    data.at_v0 = [&](double th, double et) { return exact.value(th, et, 0.0); };
    data.at_theta0 = [&](double et, double v) { return exact.value(0.0, et, v); };
    WaveOptions opt;
    opt.source = source;
    opt.eta_mode = BoundaryMode::Periodic;
    const WaveState w = solve_diffractive(
        data, constant_coefficients(lambda, ncoef, dcoef), g, opt);
    spacings.push_back(g.d_theta);
    errors.push_back(max_error(w.a, exact));
  }
  const double order = estimate_order(spacings, errors).observed_order;
  CHECK(order > 1.7);
  CHECK(order < 2.3);
}
