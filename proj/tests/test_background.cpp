#include <cmath>
#include <vector>

#include "capfield/background.hpp"
#include "capfield/common.hpp"
#include "capfield/quad.hpp"
#include "capfield/specfun.hpp"
#include "doctest.h"

using namespace capfield;

namespace {

SectorGrid bg_grid(double xlo, double xhi, int xn, double klo = 0.5, double khi = 8.0,
                   int kn = 76, double khlo = 0.05, double khhi = 12.0, int khn = 481) {
  SectorGrid g;
  g.x = Axis::linspace(xlo, xhi, xn);
  g.k = Axis::linspace(klo, khi, kn);
  g.khat = Axis::linspace(khlo, khhi, khn);
  return g;
}

double weight(const Axis& x, int i) {
  if (x.n == 1) return 1.0;
  return (i == 0 || i == x.n - 1) ? 0.5 * x.dx : x.dx;
}

template <class F>
double adsimp(const F& fn, double a, double b, double fa, double fm, double fb, double whole,
              double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = fn(lm), frm = fn(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adsimp(fn, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
         adsimp(fn, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

template <class F>
double adaptive_quad(const F& fn, double a, double b, double tol) {
  const double fa = fn(a), fb = fn(b), fm = fn(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adsimp(fn, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

TEST_CASE("firm density is flat for sector independent returns") {
  auto g = bg_grid(-1.0, 1.0, 41);
  ModelSpec spec;
  spec.tau = 0.13;
  spec.funcs.R = FuncDef::power_fn(2.0, 0.35);
  spec.funcs.H = FuncDef::constant_fn(1.0);
  std::vector<double> kx(g.x.n, 2.2);
  const double D = 1.1;
  auto fd = firm_density(spec, g, kx, D);
  for (double v : fd.psi2_x)
    CHECK(v == doctest::Approx(D / (2.0 * spec.tau)).epsilon(1e-12));
  CHECK(fd.V == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fd.V0 == 0.0);
}

TEST_CASE("firm density reproduces the quadratic sector profile") {
  auto g = bg_grid(-1.0, 1.0, 41);
  ModelSpec spec;
  spec.tau = 0.13;
  spec.sigma_x2 = 0.7;
  spec.funcs.R = FuncDef::affine_fn(0.0, 0.0, 0.0, -1.0);  // R = -x^2
  spec.funcs.H = FuncDef::constant_fn(1.0);
  std::vector<double> kx(g.x.n, 2.0);
  const double D = 1.1;
  auto fd = firm_density(spec, g, kx, D);
  const double base = D / (2.0 * spec.tau);
  for (int i = 0; i < g.x.n; ++i) {
    const double x = g.x[i];
    const double expected =
        std::max(0.0, base - (4.0 * x * x - 2.0 * spec.sigma_x2) / (4.0 * spec.tau));
    CHECK(fd.psi2_x[i] == doctest::Approx(expected).epsilon(1e-12));
  }
  const int i0 = g.x.index_of(0.0);
  CHECK(fd.psi2_x[i0] ==
        doctest::Approx(base + spec.sigma_x2 / (2.0 * spec.tau)).epsilon(1e-12));
  CHECK(fd.V0 == doctest::Approx(0.15).epsilon(1e-12));  // clipped tail nodes
}

TEST_CASE("firm density matches a refined grid evaluation") {
  ModelSpec spec;
  spec.tau = 0.11;
  spec.sigma_x2 = 0.8;
  spec.funcs.R = FuncDef::power_fn(2.0, 0.4);
  spec.funcs.R.mod_amp = 0.2;
  spec.funcs.R.mod_freq = 1.0;
  spec.funcs.R.mod_phase = 0.4;
  spec.funcs.H = FuncDef::logistic_fn(0.6, 1.4, 0.8, 3.0);
  auto kx_of = [](double x) { return 3.0 + 0.3 * std::sin(1.1 * x); };
  const double D = 2.4;

  auto eval_on = [&](int xn) {
    auto g = bg_grid(-1.0, 1.0, xn);
    std::vector<double> kx(g.x.n);
    for (int i = 0; i < g.x.n; ++i) kx[i] = kx_of(g.x[i]);
    return firm_density(spec, g, kx, D);
  };
  auto coarse = eval_on(801);
  auto fine = eval_on(6401);
  double worst = 0.0;
  for (int i = 0; i < 801; ++i) {
    const double a = coarse.psi2_x[i], b = fine.psi2_x[8 * i];
    worst = std::max(worst, std::fabs(a - b) / std::fabs(b));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("firm density ignores constant shifts of the returns") {
  auto g = bg_grid(-1.0, 1.0, 101);
  ModelSpec spec;
  spec.tau = 0.12;
  spec.funcs.R = FuncDef::affine_fn(1.0, 0.15, 0.3, -0.4);
  spec.funcs.H = FuncDef::logistic_fn(0.7, 1.3, 0.5, 2.5);
  std::vector<double> kx(g.x.n);
  for (int i = 0; i < g.x.n; ++i) kx[i] = 2.0 + 0.2 * std::cos(g.x[i]);
  auto a = firm_density(spec, g, kx, 1.7);
  spec.funcs.R.a0 += 17.0;
  auto b = firm_density(spec, g, kx, 1.7);
  for (int i = 0; i < g.x.n; ++i)
    CHECK(a.psi2_x[i] == doctest::Approx(b.psi2_x[i]).epsilon(1e-10));
}

TEST_CASE("firm density rejects nonpositive tau") {
  auto g = bg_grid(-1.0, 1.0, 11);
  ModelSpec spec;
  spec.tau = 0.0;
  std::vector<double> kx(g.x.n, 2.0);
  CHECK_THROWS_AS(firm_density(spec, g, kx, 1.0), NonPositiveTau);
}

TEST_CASE("investor density reduces to a gaussian for zero index") {
  auto g = bg_grid(-0.5, 0.5, 3, 0.5, 8.0, 76, 0.0, 10.0, 2001);
  ModelSpec spec;
  BackgroundState bg;
  bg.f_x = {-0.8, -0.8, -0.8};
  bg.p_x = {0.0, 0.0, 0.0};
  bg.F_x = {0.0, 0.0, 0.0};
  bg.Nhat_X = {2.5, 2.5, 2.5};
  bg.psi2_x = {1.0, 1.0, 1.0};
  auto inv = investor_density(spec, g, bg);

  // D_0(z)^2 = exp(-z^2/2) with z = sqrt(0.8) kh: gaussian with a = 0.4
  const double a = 0.4;
  const double pi = std::acos(-1.0);
  const double closed = 0.5 * std::sqrt(pi / a) * std::erf(std::sqrt(a) * 10.0);
  CHECK(inv.C_mean * closed / 2.5 == doctest::Approx(1.0).epsilon(1e-8));

  const double at0 = inv.psihat2[g.idx_khx(1, 0)];
  for (int i : {100, 500, 900, 1400}) {
    const double kh = g.khat[i];
    CHECK(inv.psihat2[g.idx_khx(1, i)] ==
          doctest::Approx(at0 * std::exp(-a * kh * kh)).epsilon(1e-9));
  }
  for (int j = 0; j < 3; ++j) {
    std::vector<double> row(g.khat.n);
    for (int i = 0; i < g.khat.n; ++i) row[i] = inv.psihat2[g.idx_khx(j, i)];
    CHECK(trapz(g.khat, row) == doctest::Approx(2.5).epsilon(1e-12));
  }
}

TEST_CASE("investor density scales linearly with the investor count") {
  auto g = bg_grid(-0.5, 0.5, 3, 0.5, 8.0, 76, 0.05, 10.0, 801);
  ModelSpec spec;
  BackgroundState bg;
  bg.f_x = {-0.6, -0.7, -0.8};
  bg.p_x = {0.0, 0.5, 0.0};
  bg.F_x = {0.0, -0.2, 0.0};
  bg.Nhat_X = {2.5, 1.5, 3.0};
  bg.psi2_x = {1.0, 1.0, 1.0};
  auto one = investor_density(spec, g, bg);
  for (auto& v : bg.Nhat_X) v *= 2.0;
  auto two = investor_density(spec, g, bg);
  for (std::size_t i = 0; i < one.psihat2.size(); ++i)
    CHECK(two.psihat2[i] == doctest::Approx(2.0 * one.psihat2[i]).epsilon(1e-14));
}

TEST_CASE("investor density normalization matches adaptive quadrature") {
  auto g = bg_grid(-0.5, 0.5, 3, 0.5, 8.0, 76, 0.0, 12.0, 8001);
  ModelSpec spec;
  BackgroundState bg;
  bg.f_x = {-1.1, -1.0, -0.9};  // slope 0.2 in x, exact under central differences
  bg.p_x = {1.5, 1.5, 1.5};
  bg.F_x = {-0.5, -0.5, -0.5};
  bg.Nhat_X = {3.0, 3.0, 3.0};
  bg.psi2_x = {1.0, 1.0, 1.0};
  auto inv = investor_density(spec, g, bg);

  const double pref = 0.2 * 0.2 / (96.0 * 1.0);  // sigma_x2 f'^2 / (96 sigma_khat2 |f|)
  auto raw = [&](double kh) {
    const double z = kh - 0.5;  // sqrt(|f|)(kh + F/f^2), f = -1, F = -0.5
    const double d = pcf(1.5, z);
    return std::exp(-pref * kh * kh * kh * kh) * d * d;
  };
  const double z_oracle = adaptive_quad(raw, 0.0, 12.0, 1e-12);
  double worst = 0.0;
  for (int i = 0; i < g.khat.n; i += 37) {
    const double expect = 3.0 * raw(g.khat[i]) / z_oracle;
    const double got = inv.psihat2[g.idx_khx(1, i)];
    worst = std::max(worst, std::fabs(got - expect) / std::max(1e-12, expect));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("investor density error conditions") {
  auto g = bg_grid(-0.5, 0.5, 3, 0.5, 8.0, 76, 0.05, 12.0, 101);
  ModelSpec spec;
  BackgroundState bg;
  bg.f_x = {-0.6, 0.0, -0.6};
  bg.p_x = {0.0, 0.0, 0.0};
  bg.F_x = {0.0, 0.0, 0.0};
  bg.Nhat_X = {2.0, 2.0, 2.0};
  bg.psi2_x = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(investor_density(spec, g, bg), ZeroF);

  bg.f_x = {-20.0, -20.0, -20.0};  // argument reaches sqrt(20)*12 > 30
  CHECK_THROWS_AS(investor_density(spec, g, bg), PcfOutOfEnvelope);

  bg.f_x = {-0.6, -0.6, -0.6};
  bg.p_x = {0.0, 25.0, 0.0};
  CHECK_THROWS_AS(investor_density(spec, g, bg), PcfOutOfEnvelope);
}

TEST_CASE("self consistent solve is uniform for constant inputs") {
  auto g = bg_grid(-1.0, 1.0, 21);
  ModelSpec spec;
  spec.tau = 0.1;
  spec.gamma = 0.02;
  spec.epsilon = 0.5;
  spec.nu = 0.3;
  spec.n_firms_total = 10.0;
  spec.nhat_of_x = FuncDef::constant_fn(2.0);
  spec.funcs.R = FuncDef::constant_fn(2.0);
  spec.funcs.r = FuncDef::constant_fn(0.05);
  spec.funcs.H = FuncDef::constant_fn(1.0);
  spec.funcs.F0 = FuncDef::constant_fn(1.0);
  spec.funcs.F1 = FuncDef::constant_fn(0.01);
  spec.funcs.F2 = FuncDef::constant_fn(1.0);
  std::vector<double> init(g.x.n, 2.0);
  auto bg = solve_selfconsistent(spec, g, init);

  CHECK(bg.residual < 1e-8);
  CHECK(bg.iterations < spec.fp_max_iter);
  double kmin = bg.K_X[0], kmax = bg.K_X[0];
  for (double v : bg.K_X) {
    kmin = std::min(kmin, v);
    kmax = std::max(kmax, v);
  }
  CHECK(kmax - kmin < 1e-8 * kmax);

  for (double v : bg.psi2_x) CHECK(v >= 0.0);
  for (double v : bg.psihat2) CHECK(v >= 0.0);

  // invested capital equals physical capital per sector
  std::vector<double> krow(g.k.n);
  for (int j = 0; j < g.x.n; ++j) {
    CHECK(bg.K_X[j] * bg.N_X[j] ==
          doctest::Approx(bg.Khat_X[j]).epsilon(1e-10));
    for (int i = 0; i < g.k.n; ++i)
      krow[i] = g.k[i] * bg.psi2_kx[g.idx_kx(j, i)];
    CHECK(trapz(g.k, krow) == doctest::Approx(bg.Khat_X[j]).epsilon(1e-9));
  }

  // N_X reproduced by quadrature of the stored capital profile
  for (int j = 0; j < g.x.n; ++j) {
    std::vector<double> row(g.k.n);
    for (int i = 0; i < g.k.n; ++i) row[i] = bg.psi2_kx[g.idx_kx(j, i)];
    CHECK(trapz(g.k, row) == doctest::Approx(bg.N_X[j]).epsilon(1e-8));
  }

  // investor rows integrate to the exogenous sector count
  for (int j = 0; j < g.x.n; ++j) {
    std::vector<double> row(g.khat.n);
    for (int i = 0; i < g.khat.n; ++i) row[i] = bg.psihat2[g.idx_khx(j, i)];
    CHECK(trapz(g.khat, row) == doctest::Approx(bg.Nhat_X[j]).epsilon(1e-6));
  }

  // residual history non-increasing near convergence
  const auto& h = bg.residual_history;
  const std::size_t tail = h.size() > 10 ? h.size() - 10 : 0;
  for (std::size_t i = tail; i + 1 < h.size(); ++i)
    CHECK(h[i + 1] <= h[i] * (1.0 + 1e-9));
}

TEST_CASE("single sector solve matches scalar bisection") {
  SectorGrid g;
  g.x = Axis::linspace(0.0, 0.0, 1);
  g.k = Axis::linspace(0.5, 8.0, 76);
  g.khat = Axis::linspace(0.05, 12.0, 1201);
  ModelSpec spec;
  spec.tau = 0.15;
  spec.gamma = 0.03;
  spec.epsilon = 0.5;
  spec.n_firms_total = 6.0;
  spec.nhat_of_x = FuncDef::constant_fn(4.0);
  spec.funcs.R = FuncDef::power_fn(2.0, 0.35);
  spec.funcs.r = FuncDef::affine_fn(0.04, 0.002);
  spec.funcs.H = FuncDef::constant_fn(1.0);
  spec.funcs.F0 = FuncDef::constant_fn(1.0);
  spec.funcs.F1 = FuncDef::constant_fn(0.02);
  spec.funcs.F2 = FuncDef::constant_fn(1.0);
  spec.fp_lambda = 0.8;
  spec.fp_tol = 1e-13;
  spec.fp_max_iter = 50000;
  auto bg = solve_selfconsistent(spec, g, {2.0});

  CHECK(bg.psi2_x[0] == doctest::Approx(6.0).epsilon(1e-12));  // N firms in one sector

  // independent scalar residual: psi2 = 6, p = 0, no sector gradient
  auto update = [&](double K) {
    const double f = (0.04 + 0.002 * K - 0.03 * 6.0 + 0.02) / 0.5;
    const double af = std::fabs(f);
    double z0 = 0.0, m1 = 0.0;
    for (int i = 0; i < g.khat.n; ++i) {
      const double kh = g.khat[i];
      const double w = weight(g.khat, i);
      const double v = std::exp(-af * kh * kh / 2.0);
      z0 += w * v;
      m1 += w * kh * v;
    }
    return 4.0 * m1 / z0 / 6.0;
  };
  double lo = 0.5, hi = 8.0;
  REQUIRE(update(lo) - lo > 0.0);
  REQUIRE(update(hi) - hi < 0.0);
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double m = 0.5 * (lo + hi);
    (update(m) - m > 0.0 ? lo : hi) = m;
  }
  CHECK(bg.K_X[0] == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-10));
}

TEST_CASE("double well landscape converges from distinct initializers") {
  auto g = bg_grid(-1.0, 1.0, 31, 0.3, 8.0, 78);
  ModelSpec spec;
  spec.tau = 0.25;
  spec.sigma_x2 = 0.25;
  spec.gamma = 0.005;
  spec.epsilon = 0.5;
  spec.n_firms_total = 12.0;
  spec.nhat_of_x = FuncDef::constant_fn(4.0);
  spec.funcs.R = FuncDef::power_fn(1.5, 0.4);
  spec.funcs.R.mod_amp = 0.05;
  spec.funcs.R.mod_freq = 2.0 * std::acos(-1.0);  // two wells inside the domain
  spec.funcs.r = FuncDef::constant_fn(-0.1);
  spec.funcs.H = FuncDef::constant_fn(1.0);
  spec.funcs.F0 = FuncDef::constant_fn(1.0);
  spec.funcs.F1 = FuncDef::affine_fn(0.01, 0.005);
  spec.funcs.F2 = FuncDef::constant_fn(1.0);

  auto a = solve_selfconsistent(spec, g, std::vector<double>(g.x.n, 1.0));
  auto b = solve_selfconsistent(spec, g, std::vector<double>(g.x.n, 5.0));
  CHECK(a.residual < 1e-8);
  CHECK(b.residual < 1e-8);
  for (double v : a.K_X) CHECK(v > 0.0);
  for (double v : b.K_X) CHECK(v > 0.0);
}

TEST_CASE("crowding constant trivial cases") {
  auto g = bg_grid(-1.0, 1.0, 21);
  ModelSpec spec;
  spec.tau = 0.2;
  spec.n_firms_total = 7.0;
  spec.funcs.R = FuncDef::constant_fn(2.0);
  spec.funcs.H = FuncDef::constant_fn(1.0);
  BackgroundState bg;
  bg.grid = g;
  bg.K_X.assign(g.x.n, 2.0);
  bg.psi2_x.assign(g.x.n, 3.0);
  bg.Khat_X.assign(g.x.n, 6.0);
  bg.V = 2.0;
  bg.V0 = 0.0;
  CHECK(compute_D_const(spec, bg) ==
        doctest::Approx(2.0 * 0.2 * 7.0 / 2.0).epsilon(1e-14));

  spec.tau = 0.0;
  CHECK(compute_D_const(spec, bg) == 0.0);

  bg.V0 = 2.0;
  CHECK_THROWS_AS(compute_D_const(spec, bg), DegenerateVolume);
}

TEST_CASE("crowding constant matches direct quadrature") {
  auto g = bg_grid(-1.0, 1.0, 201);
  ModelSpec spec;
  spec.tau = 0.17;
  spec.sigma_x2 = 0.8;
  spec.n_firms_total = 9.0;
  spec.funcs.R = FuncDef::power_fn(1.7, 0.45);
  spec.funcs.R.mod_amp = 0.15;
  spec.funcs.R.mod_freq = 1.1;
  spec.funcs.R.mod_phase = 0.3;
  spec.funcs.H = FuncDef::logistic_fn(0.6, 1.5, 0.7, 2.0);

  BackgroundState bg;
  bg.grid = g;
  bg.K_X.resize(g.x.n);
  bg.psi2_x.resize(g.x.n);
  bg.Khat_X.resize(g.x.n);
  for (int i = 0; i < g.x.n; ++i) {
    const double x = g.x[i];
    bg.K_X[i] = 2.0 + 0.4 * std::sin(1.3 * x);
    bg.psi2_x[i] = (i >= 30 && i <= 40) ? 0.0 : 4.0 + std::cos(x);
    bg.Khat_X[i] = bg.K_X[i] * bg.psi2_x[i];
  }
  bg.V = 2.0;
  bg.V0 = 0.0;
  for (int i = 30; i <= 40; ++i) bg.V0 += weight(g.x, i);

  const double got = compute_D_const(spec, bg);

  // script the same formula with hand-rolled evaluation; the sector
  // derivative holds the capital argument fixed
  auto r_at = [&](int i, int j) {
    return 1.7 * std::pow(bg.K_X[i], 0.45) * (1.0 + 0.15 * std::cos(1.1 * g.x[j] + 0.3));
  };
  auto h_of = [](double v) { return 0.6 + 0.9 / (1.0 + std::exp(-0.7 * (v - 2.0))); };
  double num = 0.0, den = 0.0;
  for (int i = 0; i < g.x.n; ++i) {
    if (bg.psi2_x[i] <= 0.0) continue;
    double dr;
    if (i == 0)
      dr = (-3.0 * r_at(0, 0) + 4.0 * r_at(0, 1) - r_at(0, 2)) / (2.0 * g.x.dx);
    else if (i == g.x.n - 1)
      dr = (3.0 * r_at(i, i) - 4.0 * r_at(i, i - 1) + r_at(i, i - 2)) / (2.0 * g.x.dx);
    else
      dr = (r_at(i, i + 1) - r_at(i, i - 1)) / (2.0 * g.x.dx);
    num += weight(g.x, i) * dr * dr;
    den += weight(g.x, i);
  }
  double khat_total = 0.0;
  for (int i = 0; i < g.x.n; ++i) khat_total += weight(g.x, i) * bg.Khat_X[i];
  const double kbar = khat_total / 9.0;
  const double hs = 1e-6 * std::max(1.0, kbar);
  const double hp = (h_of(kbar + hs) - h_of(kbar - hs)) / (2.0 * hs);
  const double expected =
      std::max(0.0, 2.0 * 0.17 * 9.0 / (2.0 - bg.V0) +
                        0.5 / 0.8 * (num / den) * h_of(kbar) * h_of(kbar) *
                            (1.0 - hp * kbar / h_of(kbar)));
  CHECK(got == doctest::Approx(expected).epsilon(1e-8));

  // quadratic returns with a linear capital field differentiate exactly
  spec.funcs.R = FuncDef::affine_fn(1.0, 0.2, 0.5, -0.3);
  for (int i = 0; i < g.x.n; ++i) {
    bg.K_X[i] = 2.0 + 0.3 * g.x[i];
    bg.psi2_x[i] = 4.0;
    bg.Khat_X[i] = bg.K_X[i] * 4.0;
  }
  bg.V0 = 0.0;
  const double got2 = compute_D_const(spec, bg);
  double num2 = 0.0;
  for (int i = 0; i < g.x.n; ++i) {
    const double dr = 0.5 - 0.6 * g.x[i];  // analytic partial sector derivative
    num2 += weight(g.x, i) * dr * dr;
  }
  double khat2 = 0.0;
  for (int i = 0; i < g.x.n; ++i) khat2 += weight(g.x, i) * bg.Khat_X[i];
  const double kbar2 = khat2 / 9.0;
  const double hp2 = (h_of(kbar2 + 1e-6 * std::max(1.0, kbar2)) -
                      h_of(kbar2 - 1e-6 * std::max(1.0, kbar2))) /
                     (2.0e-6 * std::max(1.0, kbar2));
  const double expected2 =
      std::max(0.0, 2.0 * 0.17 * 9.0 / 2.0 + 0.5 / 0.8 * (num2 / 2.0) * h_of(kbar2) *
                                                 h_of(kbar2) * (1.0 - hp2 * kbar2 / h_of(kbar2)));
  CHECK(got2 == doctest::Approx(expected2).epsilon(1e-8));
}
