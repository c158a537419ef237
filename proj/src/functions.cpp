#include "capfield/functions.hpp"

#include <algorithm>
#include <cmath>

#include "capfield/common.hpp"

namespace capfield {

FuncDef FuncDef::constant_fn(double value) {
  FuncDef f;
  f.family = FuncFamily::constant;
  f.c = value;
  return f;
}

FuncDef FuncDef::affine_fn(double a0, double a_k, double a_x, double a_xx) {
  FuncDef f;
  f.family = FuncFamily::affine;
  f.a0 = a0;
  f.a_k = a_k;
  f.a_x = a_x;
  f.a_xx = a_xx;
  return f;
}

FuncDef FuncDef::power_fn(double scale, double exponent) {
  FuncDef f;
  f.family = FuncFamily::power;
  f.c = scale;
  f.expo = exponent;
  return f;
}

FuncDef FuncDef::logistic_fn(double lo, double hi, double rate, double mid) {
  FuncDef f;
  f.family = FuncFamily::logistic;
  f.lo = lo;
  f.hi = hi;
  f.rate = rate;
  f.mid = mid;
  return f;
}

FuncDef FuncDef::tabulated_fn(std::vector<double> xs, std::vector<double> ys) {
  FuncDef f;
  f.family = FuncFamily::tabulated;
  f.tab_x = std::move(xs);
  f.tab_y = std::move(ys);
  return f;
}

namespace {

double interp_tab(const FuncDef& f, double v) {
  const auto& xs = f.tab_x;
  const auto& ys = f.tab_y;
  if (v <= xs.front()) return ys.front();
  if (v >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), v);
  const std::size_t j = static_cast<std::size_t>(it - xs.begin());
  const double t = (v - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

double logistic_at(const FuncDef& f, double rate, double v) {
  return f.lo + (f.hi - f.lo) / (1.0 + std::exp(-rate * (v - f.mid)));
}

double sector_mod(const FuncDef& f, double x) {
  if (f.mod_amp == 0.0) return 1.0;
  return 1.0 + f.mod_amp * std::cos(f.mod_freq * x + f.mod_phase);
}

}  // namespace

double eval_scalar(const FuncDef& f, double v) {
  switch (f.family) {
    case FuncFamily::constant:
      return f.c;
    case FuncFamily::affine:
      return f.a0 + f.a_k * v;
    case FuncFamily::power:
      return f.c * std::pow(v, f.expo);
    case FuncFamily::logistic:
      return logistic_at(f, f.rate, v);
    case FuncFamily::tabulated:
      return interp_tab(f, v);
  }
  return 0.0;
}

double eval_scalar_s(const FuncDef& f, double s, double v) {
  if (f.family == FuncFamily::logistic) return logistic_at(f, f.rate * s, v);
  return eval_scalar(f, v);
}

double eval_kx(const FuncDef& f, double k, double x) {
  switch (f.family) {
    case FuncFamily::constant:
      return f.c * sector_mod(f, x);
    case FuncFamily::affine:
      return f.a0 + f.a_k * k + f.a_x * x + f.a_xx * x * x;
    case FuncFamily::power:
      return f.c * std::pow(k, f.expo) * sector_mod(f, x);
    case FuncFamily::logistic:
      return logistic_at(f, f.rate, k) * sector_mod(f, x);
    case FuncFamily::tabulated:
      return interp_tab(f, k) * sector_mod(f, x);
  }
  return 0.0;
}

void validate_funcdef(const FuncDef& f, const std::string& name, double lo, double hi) {
  if (f.family != FuncFamily::tabulated) return;
  if (f.tab_x.size() < 2 || f.tab_x.size() != f.tab_y.size())
    throw ConfigError(name + ": tabulated definition needs matching xs/ys with >= 2 points");
  for (std::size_t i = 1; i < f.tab_x.size(); ++i)
    if (f.tab_x[i] <= f.tab_x[i - 1])
      throw ConfigError(name + ": tabulated xs must be strictly increasing");
  if (lo <= hi && (f.tab_x.front() > lo || f.tab_x.back() < hi))
    throw ConfigError(name + ": table does not cover the grid range");
}

}  // namespace capfield
