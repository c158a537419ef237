#include "capfield/quad.hpp"

#include <cmath>
#include <cstddef>

#include "capfield/common.hpp"

namespace capfield {

double trapz(double dx, const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double s = 0.5 * (v.front() + v.back());
  for (size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return s * dx;
}

double trapz(const Axis& ax, const std::vector<double>& v) { return trapz(ax.dx, v); }

double simpson(double dx, const std::vector<double>& v) {
  const size_t n = v.size();
  if (n < 2) return 0.0;
  if (n == 2) return trapz(dx, v);
  size_t start = 0;
  double s = 0.0;
  if ((n - 1) % 2 != 0) {
    if (n < 4) return trapz(dx, v);
    // 3/8 rule on the first three intervals, classic Simpson on the rest
    s += dx * 3.0 / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3]);
    start = 3;
  }
  double acc = v[start] + v[n - 1];
  for (size_t i = start + 1; i < n - 1; ++i) acc += ((i - start) % 2 == 1 ? 4.0 : 2.0) * v[i];
  s += acc * dx / 3.0;
  return s;
}

std::vector<double> central_diff(const Axis& ax, const std::vector<double>& v) {
  const int n = ax.n;
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  const double h = ax.dx;
  for (int i = 1; i < n - 1; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  if (n == 2) {
    d[0] = d[1] = (v[1] - v[0]) / h;
    return d;
  }
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return d;
}

std::vector<double> second_diff(const Axis& ax, const std::vector<double>& v) {
  const int n = ax.n;
  std::vector<double> d(n, 0.0);
  if (n < 3) return d;
  const double h2 = ax.dx * ax.dx;
  for (int i = 1; i < n - 1; ++i) d[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
  d[0] = d[1];
  d[n - 1] = d[n - 2];
  return d;
}

double integrate_segment(const std::function<double(double)>& f, double a, double b, int n) {
  if (a == b) return 0.0;
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

namespace {

// Nodes and weights for generalized Gauss-Laguerre (alpha = 0) via Newton
// iteration on the recurrence-evaluated polynomial; standard initial guesses
// from Stroud & Secrest.
GaussLaguerre build_laguerre(int n) {
  GaussLaguerre g;
  g.x.resize(n);
  g.w.resize(n);
  // evaluates (L_n(z), L_{n-1}(z)) by the three-term recurrence
  auto eval = [n](double z) {
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0 - z) * p2 - (j - 1.0) * p3) / j;
    }
    return std::pair<double, double>(p1, p2);
  };
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * n);
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * n);
    } else {
      z += ((1.0 + 2.55 * (i - 1)) / (1.9 * (i - 1))) * (z - g.x[i - 2]);
    }
    for (int it = 0; it < 100; ++it) {
      auto [p1, p2] = eval(z);
      double pp = n * (p1 - p2) / z;
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    auto [p1, p2] = eval(z);
    double pp = n * (p1 - p2) / z;
    g.x[i] = z;
    // weight for integral_0^inf e^{-x} f(x) dx
    g.w[i] = -1.0 / (n * pp * p2);
  }
  return g;
}

}  // namespace

const GaussLaguerre& GaussLaguerre::rule64() {
  static const GaussLaguerre g = build_laguerre(64);
  return g;
}

double GaussLaguerre::laplace(const std::function<double(double)>& f, double alpha) const {
  if (!(alpha > 0.0)) throw NumericError("GaussLaguerre::laplace: alpha must be positive");
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += w[i] * f(x[i] / alpha);
  return s / alpha;
}

void solve_tridiag(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c,
                   std::vector<double>& d) {
  const size_t n = b.size();
  for (size_t i = 1; i < n; ++i) {
    double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

}  // namespace capfield
