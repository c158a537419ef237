#include "capfield/specfun.hpp"

#include <cmath>
#include <limits>

#include "capfield/common.hpp"

namespace capfield {

namespace {

constexpr double kEnvP = 20.0;
constexpr double kEnvZ = 30.0;
constexpr double kAsymSwitchZ = 5.0;

// Minimal double-double arithmetic (Dekker/Knuth error-free transforms).
// Only what the Kummer series needs: the two confluent series cancel to about
// exp(z^2/2) of their own magnitude (times order-dependent factors) near the
// region switch, which is beyond what long double can carry.
struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD dd_from(double a) { return {a, 0.0}; }

inline DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DD dd_add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  double lo = s.lo + a.lo + b.lo;
  return two_sum(s.hi, lo);
}

inline DD two_prod(double a, double b) {
  double p = a * b;
  double err = std::fma(a, b, -p);
  return {p, err};
}

inline DD dd_mul_d(DD a, double b) {
  DD p = two_prod(a.hi, b);
  p.lo += a.lo * b;
  return two_sum(p.hi, p.lo);
}

inline DD dd_div_d(DD a, double b) {
  double q1 = a.hi / b;
  DD r = two_prod(q1, b);
  double q2 = ((a.hi - r.hi) - r.lo + a.lo) / b;
  return two_sum(q1, q2);
}

// 1/Gamma(x), zero at the poles (x a nonpositive integer).
double rgamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

// Kummer confluent series M(a, b, w) with double-double term recurrence.
DD kummer_dd(double a, double b, double w) {
  DD sum = dd_from(1.0);
  DD term = dd_from(1.0);
  const int nmax = 4000;
  for (int n = 0; n < nmax; ++n) {
    term = dd_mul_d(term, (a + n) * w);
    term = dd_div_d(term, (b + n) * (n + 1));
    sum = dd_add(sum, term);
    if (std::abs(term.hi) < 1e-34 * std::abs(sum.hi) && n > w) break;
  }
  return sum;
}

// D_p(z) via the standard two-series confluent representation,
//   D_p = 2^{p/2} sqrt(pi) e^{-z^2/4} [ M(-p/2,1/2,w)/Gamma((1-p)/2)
//                                       - sqrt(2) z M((1-p)/2,3/2,w)/Gamma(-p/2) ]
// with w = z^2/2. `cancel` reports how strongly the two terms cancelled: the
// Gamma coefficients only carry double precision, so the result loses about
// cancel * 1e-16 in relative accuracy no matter how the series are summed.
struct SeriesEval {
  double value;
  double cancel;
};

SeriesEval pcf_series_full(double p, double z) {
  const double w = 0.5 * z * z;
  DD m1 = kummer_dd(-0.5 * p, 0.5, w);
  DD m2 = kummer_dd(0.5 * (1.0 - p), 1.5, w);
  const double c1 = rgamma(0.5 * (1.0 - p));
  const double c2 = rgamma(-0.5 * p);
  DD t1 = dd_mul_d(m1, c1);
  DD t2 = dd_mul_d(m2, -std::sqrt(2.0) * z * c2);
  DD comb = dd_add(t1, t2);
  const double pref = std::exp2(0.5 * p) * std::sqrt(M_PI) * std::exp(-0.25 * z * z);
  const double mag = std::max(std::abs(t1.hi), std::abs(t2.hi));
  const double cancel =
      comb.hi != 0.0 ? mag / std::abs(comb.hi) : (mag > 0.0 ? 1e300 : 0.0);
  return {pref * (comb.hi + comb.lo), cancel};
}

double pcf_series(double p, double z) { return pcf_series_full(p, z).value; }

// Poincare expansion D_p(z) ~ e^{-z^2/4} z^p sum_s (-1)^s (-p)_{2s} / (s! (2 z^2)^s),
// tracked with a minimum-term error estimate. Terminates exactly for
// nonnegative integer p.
struct AsymEval {
  double value;
  double rel_err;
};

AsymEval pcf_asym(double p, double z) {
  const double inv = 1.0 / (2.0 * z * z);
  long double term = 1.0L;
  long double sum = 1.0L;
  double min_rel = 1.0;
  const int smax = 200;
  for (int s = 0; s < smax; ++s) {
    const double f1 = -p + 2.0 * s;
    const double f2 = -p + 2.0 * s + 1.0;
    term *= static_cast<long double>(-f1 * f2 * inv / (s + 1));
    const double rel = std::abs(static_cast<double>(term / sum));
    if (rel >= min_rel && s > 1) break;  // series turned; stop at the minimum term
    sum += term;
    min_rel = rel;
    if (rel < 1e-18) break;
  }
  const double pref = std::exp(-0.25 * z * z + p * std::log(z));
  return {pref * static_cast<double>(sum), min_rel};
}

// Ratio D_p(z) / D_{p-1}(z) by the Pincherle continued fraction of the order
// recurrence, evaluated by backward seeding far below p (the iteration
// r_{q+1} = z - q / r_q contracts toward the recessive-direction ratio as q
// rises, so the seed washes out). The per-level contraction weakens as z
// shrinks, roughly exp(-2 z (sqrt(depth) - sqrt(|p|))) in total, so the
// seeding depth adapts to z.
double pcf_ratio_cf(double p, double z) {
  const double zp = std::max(z, 1.0);
  const double ap = std::max(std::abs(p), 1.0);
  const double need = std::sqrt(ap) + 17.0 / zp;
  const int extra = std::max(90, static_cast<int>(need * need - ap) + 10);
  double r = z;  // any O(z) seed
  for (int i = extra; i >= 1; --i) {
    const double q = p - i;
    r = z - q / r;
  }
  return r;
}

// For z >= switch with p below the terminating cases the function is
// recessive in the downward order direction, so neither the Poincare series
// (divergent head) nor downward recurrence (amplifies the dominant companion)
// can reach it. Combine the continued-fraction ratio with the reflection
// Wronskian
//   D_p(z) D_{p-1}(-z) + D_{p-1}(z) D_p(-z) = sqrt(2 pi) / Gamma(1-p),
// whose negative-argument values are dominant and cancellation-free in the
// series representation (for p < 0 both series terms carry the same sign).
struct PcfPair {
  double dp;    // D_p(z)
  double dpm1;  // D_{p-1}(z)
};

PcfPair pcf_pair_wronskian(double p, double z) {
  const double rho = pcf_ratio_cf(p, z);
  const double a = pcf_series(p - 1.0, -z);
  const double b = pcf_series(p, -z);
  const double c = std::sqrt(2.0 * M_PI) / std::tgamma(1.0 - p);
  const double dpm1 = c / (rho * a + b);
  return {rho * dpm1, dpm1};
}

}  // namespace

namespace {

// Anchor-based evaluation for z > 0: Wronskian pair directly for p <= 0,
// otherwise lift the pair upward through D_{q+1} = z D_q - q D_{q-1} (the
// target solution gains on the companion at every step in this direction).
double pcf_anchored(double p, double z) {
  if (p <= 0.0) return pcf_pair_wronskian(p, z).dp;
  const double pb = p - std::floor(p) - 1.0;  // in [-1, 0)
  const int m = static_cast<int>(std::llround(p - pb));
  PcfPair base = pcf_pair_wronskian(pb, z);
  double dm1 = base.dpm1;
  double d0 = base.dp;
  double q = pb;
  for (int i = 0; i < m; ++i, q += 1.0) {
    const double d1 = z * d0 - q * dm1;
    dm1 = d0;
    d0 = d1;
  }
  return d0;
}

}  // namespace

PcfResult pcf_full(double p, double z) {
  if (std::abs(p) > kEnvP || std::abs(z) > kEnvZ)
    throw OutOfEnvelope("pcf: (p, z) outside supported envelope |p| <= 20, |z| <= 30");
  if (z < kAsymSwitchZ) {
    SeriesEval s = pcf_series_full(p, z);
    // At z <= 0 the two terms reinforce; at moderate positive z they can
    // cancel far past double precision (deep negative orders), in which case
    // the anchored route is accurate where the series is not.
    if (z <= 0.0 || s.cancel < 1e6) return {s.value, PcfMethod::series};
    return {pcf_anchored(p, z), PcfMethod::recurrence};
  }

  // Direct asymptotic evaluation when it terminates or super-converges
  // (nonnegative integer p terminates exactly).
  AsymEval direct = pcf_asym(p, z);
  if (direct.rel_err < 1e-13) return {direct.value, PcfMethod::asymptotic};
  return {pcf_anchored(p, z), PcfMethod::recurrence};
}

double pcf(double p, double z) { return pcf_full(p, z).value; }

double pcf_deriv(double p, double z) {
  return p * pcf(p - 1.0, z) - 0.5 * z * pcf(p, z);
}

}  // namespace capfield
