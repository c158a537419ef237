#include "capfield/interactions.hpp"

#include <cmath>
#include <functional>
#include <vector>

#include "capfield/common.hpp"
#include "capfield/functions.hpp"
#include "capfield/quad.hpp"

namespace capfield {

namespace {

FirmCoord firm_midpoint(const FirmQuery& q) {
  return FirmCoord{0.5 * (q.initial.K + q.final.K), 0.5 * (q.initial.X + q.final.X), q.initial.s};
}

InvestorCoord investor_midpoint(const InvestorQuery& q) {
  return InvestorCoord{0.5 * (q.initial.Khat + q.final.Khat),
                       0.5 * (q.initial.Xhat + q.final.Xhat)};
}

void check_firm_crossing(const SectorGrid& g, const FirmCoord& c) {
  if (!g.x.contains(c.X)) throw ConfigError("crossing sector lies outside the grid range");
  if (c.K < g.k.lo || c.K > g.k.hi)
    throw ConfigError("crossing capital lies outside the grid range");
}

void check_investor_crossing(const SectorGrid& g, const InvestorCoord& c) {
  if (!g.x.contains(c.Xhat)) throw ConfigError("crossing sector lies outside the grid range");
  if (c.Khat < g.khat.lo || c.Khat > g.khat.hi)
    throw ConfigError("crossing capital lies outside the grid range");
}

// central difference step for capital-direction derivatives
double capital_step(double k) { return 5e-4 * std::max(1.0, std::abs(k)); }

// sector-direction central difference with the stencil pair shifted inside the
// domain near the edges, matching the path-integrand convention
double sector_gradient(const Axis& x, const std::function<double(double)>& fn, double at) {
  const double h = 0.5 * x.dx;
  double lo = at - h, hi = at + h;
  if (lo < x.lo) {
    hi += x.lo - lo;
    lo = x.lo;
  } else if (hi > x.hi) {
    lo -= hi - x.hi;
    hi = x.hi;
  }
  return (fn(hi) - fn(lo)) / (hi - lo);
}

// symmetrized capital gradient of the mutual-attractiveness coupling
double allocation_coupling_grad(const ModelSpec& spec, const BackgroundState& bg,
                                const FirmCoord& at, const FirmCoord& other) {
  const double khat = sector_interp(bg.grid.x, bg.Khat_X, at.X);
  const double f2_other = eval_F2hat(spec, bg, other);
  auto u2 = [&](double k) {
    return -eval_F2hat(spec, bg, FirmCoord{k, at.X, at.s}) * f2_other * khat / spec.epsilon;
  };
  const double h = capital_step(at.K);
  return (u2(at.K + h) - u2(at.K - h)) / (2.0 * h);
}

double repulsion_weight(const ModelSpec& spec, const BackgroundState& bg, const FirmCoord& c) {
  if (!spec.tau_capital_weighted) return 1.0;
  return sector_interp(bg.grid.x, bg.K_X, c.X) / c.K;
}

double routed_firm_log(const ModelSpec& spec, const BackgroundState& bg, const FirmQuery& q,
                       const FirmCoord& c) {
  FirmQuery in = q;
  in.final = c;
  FirmQuery out = q;
  out.initial = c;
  return firm_transition(spec, bg, in).log_value + firm_transition(spec, bg, out).log_value;
}

double routed_investor_log(const ModelSpec& spec, const BackgroundState& bg,
                           const InvestorQuery& q, const InvestorCoord& c) {
  InvestorQuery in = q;
  in.final = c;
  InvestorQuery out = q;
  out.initial = c;
  return investor_transition(spec, bg, in).log_value +
         investor_transition(spec, bg, out).log_value;
}

}  // namespace

double firm_return_gain(const ModelSpec& spec, const BackgroundState& bg, double K, double xhat,
                        double s) {
  const Axis& k = bg.grid.k;
  const std::vector<double> profile = firm_profile_at(bg, xhat);
  const double denom = f2_denominator(spec, bg, xhat, profile);
  if (!(denom > 0)) throw ZeroDenominator("no firm density at the queried sector");
  const double z_r = return_normalizer(spec, bg);
  if (!(z_r > 0)) throw ZeroDenominator("total-return normalizer integrates to zero");
  const double khat = sector_interp(bg.grid.x, bg.Khat_X, xhat);
  const double kx = sector_interp(bg.grid.x, bg.K_X, xhat);
  if (!(kx > 0)) throw ZeroDenominator("no invested capital at the queried sector");

  std::vector<double> kcol(k.n);
  for (int ik = 0; ik < k.n; ++ik) kcol[ik] = k[ik] * profile[ik];
  const double capital_total = trapz(k, kcol);

  // investor-weighted gain of a firm with capital kk and attractiveness share
  // f2h, as in the sector drift
  auto gain = [&](double kk, double v, double f2h) {
    const double gamma_kx = f2h * khat / kk - 1.0;
    const double f1 = eval_scalar(spec.funcs.F1, v / z_r) + spec.funcs.F1.gamma_coupling * gamma_kx;
    return eval_kx(spec.funcs.r, kk, xhat) - spec.gamma * capital_total / kk + f1;
  };

  // sector mean over the s-averaged density
  std::vector<double> integrand(k.n);
  for (int ik = 0; ik < k.n; ++ik) {
    const double v = eval_kx(spec.funcs.R, k[ik], xhat);
    const double f2h = f2_s_avg(spec, v) / denom;
    integrand[ik] = gain(k[ik], v, f2h) * f2h * profile[ik];
  }
  const double mean_gain = trapz(k, integrand);

  // the firm itself carries its own type share
  const double v_own = eval_kx(spec.funcs.R, K, xhat);
  const double f2_own = eval_scalar_s(spec.funcs.F2, s, v_own) / denom;
  const double gain_own = gain(K, v_own, f2_own);
  return ((gain_own - mean_gain) * f2_own - spec.gamma * K / kx) / spec.epsilon;
}

double firm_preference_shift(const ModelSpec& spec, const BackgroundState& bg, double K,
                             double xhat) {
  const Axis& x = bg.grid.x;
  const double n_here = sector_interp(x, bg.N_X, xhat);
  if (!(n_here > 0)) throw ZeroDenominator("no firm density at the queried sector");
  if (x.n < 2) return 0.0;
  const double z_r = spec.nu != 0.0 ? return_normalizer(spec, bg) : 1.0;
  if (!(z_r > 0)) throw ZeroDenominator("total-return normalizer integrates to zero");

  auto preference = [&](double xx) {
    const double v = eval_kx(spec.funcs.R, K, xx);
    double w = eval_scalar(spec.funcs.F0, v);
    if (spec.nu != 0.0) w += spec.nu * eval_scalar(spec.funcs.F1, v / z_r);
    return w;
  };
  const double g_own = sector_gradient(x, preference, xhat);
  return (g_own - sector_interp(x, bg.g_x, xhat)) / n_here;
}

PairVertex firm_pair_vertex(const ModelSpec& spec, const BackgroundState& bg,
                            const FirmPairQuery& pq) {
  const FirmCoord ca = pq.explicit_crossing ? pq.crossing_a : firm_midpoint(pq.a);
  const FirmCoord cb = pq.explicit_crossing ? pq.crossing_b : firm_midpoint(pq.b);
  check_firm_crossing(bg.grid, ca);
  check_firm_crossing(bg.grid, cb);

  PairVertex v;
  v.parts[0] = spec.tau * repulsion_weight(spec, bg, ca);
  v.parts[1] = spec.tau * repulsion_weight(spec, bg, cb);
  // the coupling derivative acts on either agent's capital; average the two
  // orderings so the vertex is exchange symmetric
  v.parts[2] = -0.5 * (allocation_coupling_grad(spec, bg, ca, cb) +
                       allocation_coupling_grad(spec, bg, cb, ca));
  v.value = v.parts[0] + v.parts[1] + v.parts[2];
  return v;
}

PairVertex mixed_pair_vertex(const ModelSpec& spec, const BackgroundState& bg,
                             const MixedPairQuery& pq) {
  const FirmCoord ca = pq.explicit_crossing ? pq.crossing_a : firm_midpoint(pq.a);
  const InvestorCoord cb = pq.explicit_crossing ? pq.crossing_b : investor_midpoint(pq.b);
  check_firm_crossing(bg.grid, ca);
  check_investor_crossing(bg.grid, cb);

  PairVertex v;
  // gradient of the firm's attractiveness share, scaled by the invested capital
  auto f2_at = [&](double k) { return eval_F2hat(spec, bg, FirmCoord{k, ca.X, ca.s}); };
  const double h = capital_step(ca.K);
  v.parts[0] = (f2_at(ca.K + h) - f2_at(ca.K - h)) / (2.0 * h) * cb.Khat / spec.epsilon;

  v.parts[1] = firm_return_gain(spec, bg, ca.K, cb.Xhat, ca.s);

  auto shift = [&](double xx) { return firm_preference_shift(spec, bg, ca.K, xx); };
  v.parts[2] = sector_gradient(bg.grid.x, shift, cb.Xhat);

  v.value = v.parts[0] + v.parts[1] + v.parts[2];
  return v;
}

double firm_pair_transition(const ModelSpec& spec, const BackgroundState& bg,
                            const FirmPairQuery& pq) {
  const double la = firm_transition(spec, bg, pq.a).log_value;
  const double lb = firm_transition(spec, bg, pq.b).log_value;
  const PairVertex v = firm_pair_vertex(spec, bg, pq);
  const FirmCoord ca = pq.explicit_crossing ? pq.crossing_a : firm_midpoint(pq.a);
  const FirmCoord cb = pq.explicit_crossing ? pq.crossing_b : firm_midpoint(pq.b);
  const double ra = routed_firm_log(spec, bg, pq.a, ca);
  const double rb = routed_firm_log(spec, bg, pq.b, cb);
  return std::exp(la + lb) - v.value * std::exp(ra + rb);
}

double mixed_pair_transition(const ModelSpec& spec, const BackgroundState& bg,
                             const MixedPairQuery& pq) {
  const double la = firm_transition(spec, bg, pq.a).log_value;
  const double lb = investor_transition(spec, bg, pq.b).log_value;
  const PairVertex v = mixed_pair_vertex(spec, bg, pq);
  const FirmCoord ca = pq.explicit_crossing ? pq.crossing_a : firm_midpoint(pq.a);
  const InvestorCoord cb = pq.explicit_crossing ? pq.crossing_b : investor_midpoint(pq.b);
  const double ra = routed_firm_log(spec, bg, pq.a, ca);
  const double rb = routed_investor_log(spec, bg, pq.b, cb);
  return std::exp(la + lb) + v.value * std::exp(ra + rb);
}

double investor_pair_transition(const ModelSpec& spec, const BackgroundState& bg,
                                const InvestorPairQuery& pq) {
  const double la = investor_transition(spec, bg, pq.a).log_value;
  const double lb = investor_transition(spec, bg, pq.b).log_value;
  return std::exp(la + lb);
}

}  // namespace capfield
