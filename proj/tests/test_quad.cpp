#include <cmath>
#include <vector>

#include "capfield/common.hpp"
#include "capfield/grid.hpp"
#include "capfield/quad.hpp"
#include "doctest.h"

using namespace capfield;

TEST_CASE("trapezoid is exact on linear data") {
  Axis ax = Axis::linspace(0.0, 2.0, 101);
  std::vector<double> lin(ax.n);
  for (int i = 0; i < ax.n; ++i) lin[i] = 3.0 * ax[i] + 1.0;
  CHECK(trapz(ax, lin) == doctest::Approx(8.0).epsilon(1e-13));
  CHECK(trapz(ax.dx, lin) == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("simpson is exact on cubics for even and odd interval counts") {
  for (int n : {101, 102}) {
    Axis ax = Axis::linspace(0.0, 2.0, n);
    std::vector<double> cub(ax.n);
    for (int i = 0; i < ax.n; ++i) cub[i] = ax[i] * ax[i] * ax[i];
    CHECK(simpson(ax.dx, cub) == doctest::Approx(4.0).epsilon(1e-12));
  }
}

TEST_CASE("difference operators are exact on quadratics including boundaries") {
  Axis ax = Axis::linspace(-1.0, 3.0, 41);
  std::vector<double> v(ax.n);
  for (int i = 0; i < ax.n; ++i) v[i] = 0.5 * ax[i] * ax[i] + 3.0 * ax[i];
  auto d = central_diff(ax, v);
  auto dd = second_diff(ax, v);
  for (int i = 0; i < ax.n; ++i) {
    CHECK(d[i] == doctest::Approx(ax[i] + 3.0).epsilon(1e-11));
    CHECK(dd[i] == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("segment integral: value, orientation, second order convergence") {
  auto f = [](double t) { return std::cos(t); };
  const double b = M_PI / 2.0;
  const double i64 = integrate_segment(f, 0.0, b, 64);
  CHECK(i64 == doctest::Approx(1.0).epsilon(2e-4));
  CHECK(integrate_segment(f, b, 0.0, 64) == doctest::Approx(-i64).epsilon(1e-14));

  const double e64 = std::abs(i64 - 1.0);
  const double e128 = std::abs(integrate_segment(f, 0.0, b, 128) - 1.0);
  CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("Gauss-Laguerre rule moments and Laplace transforms") {
  const auto& gl = GaussLaguerre::rule64();
  REQUIRE(gl.x.size() == 64);
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (size_t i = 0; i < gl.x.size(); ++i) {
    CHECK(gl.w[i] > 0.0);
    if (i > 0) CHECK(gl.x[i] > gl.x[i - 1]);
    m0 += gl.w[i];
    m1 += gl.w[i] * gl.x[i];
    m2 += gl.w[i] * gl.x[i] * gl.x[i];
  }
  CHECK(m0 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m2 == doctest::Approx(2.0).epsilon(1e-12));

  CHECK(gl.laplace([](double) { return 1.0; }, 3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(gl.laplace([](double t) { return t; }, 2.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(gl.laplace([](double t) { return std::exp(-t); }, 1.0) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(gl.laplace([](double) { return 1.0; }, 0.0), NumericError);
}

TEST_CASE("tridiagonal solve reproduces the right-hand side") {
  const int n = 7;
  std::vector<double> a(n, 1.0), b(n, 4.0), c(n, 1.5), d(n);
  a[0] = 0.0;
  c[n - 1] = 0.0;
  std::vector<double> want(n);
  for (int i = 0; i < n; ++i) want[i] = 0.3 * i - 1.0;  // target solution
  for (int i = 0; i < n; ++i) {
    d[i] = b[i] * want[i];
    if (i > 0) d[i] += a[i] * want[i - 1];
    if (i + 1 < n) d[i] += c[i] * want[i + 1];
  }
  auto aa = a, bb = b, cc = c;
  solve_tridiag(aa, bb, cc, d);
  for (int i = 0; i < n; ++i) CHECK(d[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("axis construction and lookup") {
  Axis ax = Axis::linspace(0.5, 4.5, 9);
  CHECK(ax.dx == doctest::Approx(0.5));
  CHECK(ax[8] == 4.5);
  CHECK(ax.index_of(2.74) == 4);  // nearest node 2.5
  CHECK(ax.index_of(-10.0) == 0);
  CHECK(ax.index_of(99.0) == 8);
  CHECK(ax.clamp(5.2) == 4.5);
  CHECK(ax.contains(0.5));
  CHECK(!ax.contains(0.49));

  SectorGrid g;
  g.x = Axis::linspace(-1.0, 1.0, 5);
  g.k = Axis::linspace(0.1, 2.0, 4);
  g.khat = Axis::linspace(0.2, 3.0, 3);
  validate_grid(g);
  CHECK(g.idx_kx(2, 3) == 11);
  CHECK(g.idx_khx(4, 2) == 14);
  g.k.lo = -0.1;
  CHECK_THROWS_AS(validate_grid(g), ConfigError);
}
