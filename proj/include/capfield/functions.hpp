#pragma once
#include <string>
#include <vector>

namespace capfield {

// Closed registry of parametric function families. One FuncDef serves three
// call shapes: scalar f(v), shaped f(s, v), and two-variable f(K, X) where
// the sector dependence enters as a cosine modulation factor (affine excepted,
// which is affine in K and X directly).
enum class FuncFamily { constant, affine, power, logistic, tabulated };

struct FuncDef {
  FuncFamily family = FuncFamily::constant;
  double c = 1.0;                                   // constant value, power scale
  double a0 = 0.0, a_k = 0.0, a_x = 0.0, a_xx = 0.0;  // affine/quadratic coefficients
  double expo = 1.0;                                // power exponent
  double lo = 0.0, hi = 1.0, rate = 1.0, mid = 0.0; // logistic shape
  double mod_amp = 0.0, mod_freq = 0.0, mod_phase = 0.0; // sector modulation
  double gamma_coupling = 0.0;                      // linear response to Gamma (F1 only)
  std::vector<double> tab_x, tab_y;

  static FuncDef constant_fn(double value);
  static FuncDef affine_fn(double a0, double a_k, double a_x = 0.0, double a_xx = 0.0);
  static FuncDef power_fn(double scale, double exponent);
  static FuncDef logistic_fn(double lo, double hi, double rate, double mid);
  static FuncDef tabulated_fn(std::vector<double> xs, std::vector<double> ys);
};

// f(v): used for H(K), F0(v), F1(v), and X-domain inputs.
double eval_scalar(const FuncDef& f, double v);

// f(s, v): shape parameter s scales the logistic rate, inert for other families.
double eval_scalar_s(const FuncDef& f, double s, double v);

// f(K, X): two-variable form for R and r.
double eval_kx(const FuncDef& f, double k, double x);

// Throws ConfigError when a tabulated definition is malformed or does not
// cover [lo, hi] (pass lo > hi to skip the coverage check).
void validate_funcdef(const FuncDef& f, const std::string& name, double lo, double hi);

struct FunctionSet {
  FuncDef R;   // expected long-term return R(K, X)
  FuncDef r;   // bare short-term return r(K, X)
  FuncDef H;   // mobility modulation H(K)
  FuncDef F0;  // long-term preference F0(v)
  FuncDef F1;  // price-variation response F1(v [, Gamma])
  FuncDef F2;  // attractiveness response F2(s, v)
};

}  // namespace capfield
