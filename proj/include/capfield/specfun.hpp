#pragma once

namespace capfield {

// Evaluation route actually taken for a pcf call.
enum class PcfMethod { series, recurrence, asymptotic };

struct PcfResult {
  double value = 0.0;
  PcfMethod method = PcfMethod::series;
};

// Weber parabolic cylinder function D_p(z), the solution of
//   w'' + (p + 1/2 - z^2/4) w = 0
// that decays as z -> +inf. Supported envelope: |p| <= 20, |z| <= 30
// (OutOfEnvelope beyond). Closed forms: D_0 = exp(-z^2/4), D_1 = z exp(-z^2/4).
//
// Regions: two-term Kummer series for z < 5 (double-double accumulation, the
// two confluent series cancel to ~exp(z^2/2) below the switch point).
// For z >= 5 the Poincare asymptotic series is used directly when it
// terminates or super-converges; otherwise D_p is recessive in the downward
// order direction, so nonpositive orders combine the Pincherle continued
// fraction for D_p/D_{p-1} with the reflection Wronskian against the
// cancellation-free negative-argument series, and positive orders lift that
// anchor pair upward with D_{q+1} = z D_q - q D_{q-1} (stable upward).
PcfResult pcf_full(double p, double z);
double pcf(double p, double z);

// dD_p/dz from the derivative identity d/dz D_p = p D_{p-1} - (z/2) D_p.
double pcf_deriv(double p, double z);

}  // namespace capfield
