#include <doctest.h>

#include <cmath>

#include "gwd/dual.hpp"
#include "gwd/fields.hpp"

using namespace gwd;

TEST_CASE("second-order jets match hand derivatives") {
  auto f = [](auto th, auto et, auto v) {
    return sin(th) * exp(et) + th * th * v;
  };
  const double th = 0.3, et = -0.2, v = 0.7;
  const Jet2<3> j = jet2_of(f, th, et, v);

  CHECK(j.val == doctest::Approx(std::sin(th) * std::exp(et) + th * th * v));
  CHECK(j.g[0] == doctest::Approx(std::cos(th) * std::exp(et) + 2 * th * v));
  CHECK(j.g[1] == doctest::Approx(std::sin(th) * std::exp(et)));
  CHECK(j.g[2] == doctest::Approx(th * th));
  CHECK(j.h[0][0] == doctest::Approx(-std::sin(th) * std::exp(et) + 2 * v));
  CHECK(j.h[0][1] == doctest::Approx(std::cos(th) * std::exp(et)));
  CHECK(j.h[0][2] == doctest::Approx(2 * th));
  CHECK(j.h[1][1] == doctest::Approx(std::sin(th) * std::exp(et)));
  CHECK(j.h[1][2] == doctest::Approx(0.0));
}

TEST_CASE("jet hessians are symmetric") {
  auto f = [](auto th, auto et, auto v) {
    return exp(th * et) * cos(v - th) + sqrt(2.0 + et * et);
  };
  const Jet2<3> j = jet2_of(f, 0.4, -0.9, 1.3);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      CHECK(j.h[i][k] == doctest::Approx(j.h[k][i]).epsilon(1e-14));
    }
}

TEST_CASE("division and log chain rules") {
  auto f = [](auto th, auto et, auto) { return log(2.0 + th) / (1.0 + et); };
  const Jet2<3> j = jet2_of(f, 0.5, 0.25, 0.0);
  CHECK(j.g[0] == doctest::Approx(1.0 / (2.5 * 1.25)));
  CHECK(j.g[1] == doctest::Approx(-std::log(2.5) / (1.25 * 1.25)));
}

TEST_CASE("quartic bump is C^3 at support edges") {
  // value and first three derivatives vanish at the edges
  auto f = [](auto th, auto, auto) { return quartic_bump(th, 0.0, 1.0); };
  const Jet2<3> edge = jet2_of(f, 1e-9, 0.0, 0.0);
  CHECK(std::abs(edge.val) < 1e-30);
  CHECK(std::abs(edge.g[0]) < 1e-20);
  CHECK(std::abs(edge.h[0][0]) < 1e-12);
  const Jet2<3> mid = jet2_of(f, 0.5, 0.0, 0.0);
  CHECK(mid.val == doctest::Approx(1.0));
}
