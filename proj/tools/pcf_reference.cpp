// Scratch oracle for the parabolic cylinder function D_p(z), independent of
// the production implementation. Base orders in (-1, 0) come from the
// integral representation
//   D_p(z) = e^{-z^2/4} / Gamma(-p) * I(p, z),
//   I(p, z) = int_0^inf t^{-p-1} e^{-t^2/2 - z t} dt   (p < 0),
// evaluated with exp-sinh double-exponential quadrature in long double.
// Positive orders are lifted with D_{q+1} = z D_q - q D_{q-1}.
//
// Prints the reference values that are frozen into the unit tests, plus
// self-validation residuals against closed forms:
//   D_0(z) = e^{-z^2/4}
//   D_{-1}(z) = sqrt(pi/2) e^{z^2/4} erfc(z/sqrt(2))
//   D_2(z) = (z^2 - 1) e^{-z^2/4}
// and the reflection identity
//   D_p(z) D_{p-1}(-z) + D_{p-1}(z) D_p(-z) = sqrt(2 pi) / Gamma(1-p).

#include <cmath>
#include <cstdio>
#include <initializer_list>

namespace {

const long double kPi = 3.14159265358979323846264338327950288L;

// exp-sinh quadrature of g(t) = t^{-p-1} e^{-t^2/2 - z t} over (0, inf).
long double integral_rep(long double p, long double z) {
  const long double c = kPi / 2.0L;
  const long double umax = 6.5L;
  auto g = [&](long double u) -> long double {
    const long double s = c * std::sinh(u);
    // t = e^s; integrand * dt = t^{-p} e^{-t^2/2 - z t} * c cosh(u) du
    const long double t = std::exp(s);
    long double expo = -p * s - z * t;
    if (t < 1.0e130L) expo -= 0.5L * t * t;  // else underflows regardless
    else return 0.0L;
    if (expo < -11300.0L) return 0.0L;
    return std::exp(expo) * c * std::cosh(u);
  };
  long double h = 0.5L;
  long double sum = g(0.0L);
  for (long double u = h; u <= umax; u += h) sum += g(u) + g(-u);
  long double prev = sum * h;
  for (int level = 0; level < 12; ++level) {
    h *= 0.5L;
    long double add = 0.0L;
    for (long double u = h; u <= umax; u += 2.0L * h) add += g(u) + g(-u);
    sum += add;
    const long double cur = sum * h;
    if (std::fabs(cur - prev) <= 1e-19L * std::fabs(cur) && level > 2) return cur;
    prev = cur;
  }
  return prev;
}

long double pcf_base(long double p, long double z) {
  return std::exp(-0.25L * z * z) / std::tgamma(-p) * integral_rep(p, z);
}

// Lift (D_{pb-1}, D_pb) upward m steps to D_{pb+m}.
long double lift(long double dm1, long double d0, long double pb, int m, long double z) {
  long double q = pb;
  for (int i = 0; i < m; ++i, q += 1.0L) {
    const long double d1 = z * d0 - q * dm1;
    dm1 = d0;
    d0 = d1;
  }
  return d0;
}

// D_p(z) for p = pb + m with pb in (-1, 0), via integral bases.
long double pcf_ref(long double pb, int m, long double z) {
  const long double d0 = pcf_base(pb, z);
  if (m == 0) return d0;
  const long double dm1 = pcf_base(pb - 1.0L, z);
  return lift(dm1, d0, pb, m, z);
}

// D_p(z) for integer p >= 0 via closed-form bases D_0, D_{-1}.
long double pcf_int(int m, long double z) {
  const long double d0 = std::exp(-0.25L * z * z);
  if (m == 0) return d0;
  const long double dm1 =
      std::sqrt(kPi / 2.0L) * std::exp(0.25L * z * z) * erfcl(z / std::sqrt(2.0L));
  return lift(dm1, d0, 0.0L, m, z);
}

void print_point(const char* tag, double p, double z, long double v) {
  std::printf("%-28s p=%7.3f  z=%7.3f  D=%.19Le\n", tag, p, z, v);
}

void print_check(const char* tag, long double got, long double want) {
  const long double rel = std::fabs(got - want) / std::fabs(want);
  std::printf("check %-24s rel_err=%.3Le\n", tag, rel);
}

}  // namespace

int main() {
  std::printf("== self validation ==\n");
  for (long double z : {0.6L, 1.25L, 2.5L}) {
    const long double want = (z * z - 1.0L) * std::exp(-0.25L * z * z);
    print_check("D_2 closed form", pcf_int(2, z), want);
  }
  for (long double z : {1.25L, 3.0L}) {
    // reflection identity at lifted orders validates the integral-base lift
    const long double p = 2.5L;
    const long double lhs = pcf_ref(-0.5L, 3, z) * pcf_ref(-1.5L, 3, -z) +
                            pcf_ref(-1.5L, 3, z) * pcf_ref(-0.5L, 3, -z);
    const long double rhs = std::sqrt(2.0L * kPi) / std::tgamma(1.0L - p);
    print_check("lifted reflection", lhs, rhs);
  }
  for (long double z : {1.0L, 5.0L, 9.0L}) {
    const long double want =
        std::sqrt(kPi / 2.0L) * std::exp(0.25L * z * z) * erfcl(z / std::sqrt(2.0L));
    print_check("D_{-1} closed form", pcf_base(-1.0L, z), want);
  }
  {
    // reflection identity at p = -3.3, z = 8
    const long double p = -3.3L, z = 8.0L;
    const long double lhs = pcf_base(p, z) * pcf_base(p - 1.0L, -z) +
                            pcf_base(p - 1.0L, z) * pcf_base(p, -z);
    const long double rhs = std::sqrt(2.0L * kPi) / std::tgamma(1.0L - p);
    print_check("reflection identity", lhs, rhs);
  }

  std::printf("== frozen reference points ==\n");
  print_point("pinned", 2.5, 1.25, pcf_ref(-0.5L, 3, 1.25L));
  print_point("series negative order", -0.5, 2.0, pcf_base(-0.5L, 2.0L));
  print_point("series deeper order", -2.5, 0.8, pcf_base(-2.5L, 0.8L));
  print_point("series negative z", 1.5, -3.5, pcf_ref(-0.5L, 2, -3.5L));
  print_point("series generic order", 3.2, 1.7, pcf_ref(-0.8L, 4, 1.7L));
  print_point("recessive mid", -5.0, 9.0, pcf_base(-5.0L, 9.0L));
  print_point("recessive corner", -19.5, 25.0, pcf_base(-19.5L, 25.0L));
  print_point("recessive near switch", -1.8, 5.6, pcf_base(-1.8L, 5.6L));
  print_point("recessive deep", -12.0, 8.0, pcf_base(-12.0L, 8.0L));
  print_point("lifted near switch", 1.1, 5.0, pcf_ref(-0.9L, 2, 5.0L));
  print_point("lifted large z", 7.3, 8.0, pcf_ref(-0.7L, 8, 8.0L));
  print_point("terminating large z", 6.0, 11.0, pcf_int(6, 11.0L));
  print_point("series corner", 10.0, -10.0, pcf_int(10, -10.0L));
  return 0;
}
