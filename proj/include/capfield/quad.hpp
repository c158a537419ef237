#pragma once

#include <functional>
#include <vector>

#include "capfield/grid.hpp"

namespace capfield {

// Trapezoid rule on a uniform grid (the project-wide default quadrature).
double trapz(double dx, const std::vector<double>& v);
double trapz(const Axis& ax, const std::vector<double>& v);

// Composite Simpson on uniformly sampled values; odd interval counts are
// closed with a 3/8 panel at the front.
double simpson(double dx, const std::vector<double>& v);

// Second-order central differences, one-sided second-order at the ends.
std::vector<double> central_diff(const Axis& ax, const std::vector<double>& v);
std::vector<double> second_diff(const Axis& ax, const std::vector<double>& v);

// Trapezoid line integral of f along the straight segment [a, b] with n
// uniform subdivisions. Signed: integrating b -> a flips the sign.
double integrate_segment(const std::function<double(double)>& f, double a, double b, int n = 64);

// 64-node Gauss-Laguerre rule for integrals of the form
//   integral_0^inf exp(-alpha t) f(t) dt = (1/alpha) sum_i w_i f(x_i/alpha).
struct GaussLaguerre {
  std::vector<double> x;
  std::vector<double> w;
  static const GaussLaguerre& rule64();
  double laplace(const std::function<double(double)>& f, double alpha) const;
};

// Thomas algorithm, in place: solves the tridiagonal system with diagonals
// (a: sub, b: main, c: super); rhs d is overwritten with the solution.
void solve_tridiag(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c,
                   std::vector<double>& d);

}  // namespace capfield
