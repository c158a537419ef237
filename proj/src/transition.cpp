#include "capfield/transition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "capfield/common.hpp"
#include "capfield/quad.hpp"

namespace capfield {

namespace {

void check_range(const SectorGrid& g, double K, double X, const char* which) {
  if (!g.x.contains(X))
    throw ConfigError(std::string(which) + " sector lies outside the grid range");
  if (!(K >= g.k.lo && K <= g.k.hi))
    throw ConfigError(std::string(which) + " capital lies outside the grid range");
}

void check_firm_query(const SectorGrid& g, const FirmQuery& q, bool time_domain) {
  check_range(g, q.initial.K, q.initial.X, "initial");
  check_range(g, q.final.K, q.final.X, "final");
  if (q.initial.s != q.final.s)
    throw ConfigError("the shape parameter s is fixed along a transition");
  if (time_domain ? !(q.t > 0) : !(q.alpha > 0))
    throw ConfigError(time_domain ? "t must be > 0" : "alpha must be > 0");
  if (q.path_subdiv < 64) throw ConfigError("path_subdiv must be >= 64");
}

void check_investor_query(const SectorGrid& g, const InvestorQuery& q, bool time_domain) {
  if (!g.x.contains(q.initial.Xhat) || !g.x.contains(q.final.Xhat))
    throw ConfigError("query sectors must lie on the grid range");
  if (!(q.initial.Khat >= g.khat.lo && q.initial.Khat <= g.khat.hi) ||
      !(q.final.Khat >= g.khat.lo && q.final.Khat <= g.khat.hi))
    throw ConfigError("query capitals must lie on the grid range");
  if (time_domain ? !(q.t > 0) : !(q.alpha > 0))
    throw ConfigError(time_domain ? "t must be > 0" : "alpha must be > 0");
  if (q.path_subdiv < 64) throw ConfigError("path_subdiv must be >= 64");
}

// partial derivative of R in the sector coordinate at held capital; the
// stencil pair is clamped to the grid range near the edges
double return_gradient_x(const ModelSpec& spec, const Axis& x, double K, double X) {
  const double h = 0.5 * x.dx;
  const double a = std::max(x.lo, X - h);
  const double b = std::min(x.hi, X + h);
  return (eval_kx(spec.funcs.R, K, b) - eval_kx(spec.funcs.R, K, a)) / (b - a);
}

// capital investors allocate to a firm of shape s with capital K at sector X
double allocated_capital(const ModelSpec& spec, const BackgroundState& bg, double s, double K,
                         double X) {
  return eval_F2hat(spec, bg, FirmCoord{K, X, s}) * sector_interp(bg.grid.x, bg.Khat_X, X);
}

double sector_drift_firm(const ModelSpec& spec, const BackgroundState& bg, const FirmQuery& q) {
  const Axis& x = bg.grid.x;
  if (q.final.X == q.initial.X || x.n < 2) return 0.0;
  auto integrand = [&](double X) {
    const double kx = sector_interp(x, bg.K_X, X);
    return return_gradient_x(spec, x, kx, X) * eval_kx(spec.funcs.H, kx, X) / spec.sigma_x2;
  };
  return integrate_segment(integrand, q.initial.X, q.final.X, q.path_subdiv);
}

double competition_at(const BackgroundState& bg, double K, double X) {
  const double psi2 = sector_interp(bg.grid.x, bg.psi2_x, X);
  const double kx = sector_interp(bg.grid.x, bg.K_X, X);
  return psi2 * (kx - K) / K;
}

// product of shifted endpoint capitals in the mobility cross term; the
// midpoint-sector arguments follow the appendix variant, endpoint-sector
// shifted capitals the text variant
double cross_pair(const ModelSpec& spec, const BackgroundState& bg, const FirmQuery& q) {
  if (!spec.capital_channel) return 0.0;
  const double s = q.initial.s;
  if (spec.alpha_eff_variant == AlphaEffVariant::text)
    return shifted_capital_firm(spec, bg, s, q.final.K, q.final.X) *
           shifted_capital_firm(spec, bg, s, q.initial.K, q.initial.X);
  const double xbar = 0.5 * (q.initial.X + q.final.X);
  return (q.final.K - allocated_capital(spec, bg, s, q.final.K, xbar)) *
         (q.initial.K - allocated_capital(spec, bg, s, q.initial.K, xbar));
}

double scaled_distance_firm(const ModelSpec& spec, const BackgroundState& bg,
                            const FirmQuery& q) {
  const double s = q.initial.s;
  const double kpf = shifted_capital_firm(spec, bg, s, q.final.K, q.final.X);
  const double kpi = shifted_capital_firm(spec, bg, s, q.initial.K, q.initial.X);
  const double dx = q.final.X - q.initial.X;
  const double dk = kpf - kpi;
  return std::sqrt(dx * dx / (2.0 * spec.sigma_x2) + dk * dk / (2.0 * spec.sigma_k2));
}

// decay rate folding the linear-in-time kernel factors: the endpoint
// competition sum and the cross term
double laplace_rate_firm(const ModelSpec& spec, const BackgroundState& bg, const FirmQuery& q) {
  const double comp = competition_at(bg, q.final.K, q.final.X) +
                      competition_at(bg, q.initial.K, q.initial.X);
  return q.alpha + bg.D_const + spec.tau * comp +
         0.5 * spec.sigma_k2 * cross_pair(spec, bg, q);
}

double log_bessel_k1(double z) {
  if (z < 100.0) return std::log(std::cyl_bessel_k(1.0, z));
  const double zi = 1.0 / z;
  const double s = 1.0 + zi * (3.0 / 8.0 + zi * (-15.0 / 128.0 + zi * (105.0 / 1024.0)));
  const double pi = std::acos(-1.0);
  return 0.5 * std::log(0.5 * pi * zi) - z + std::log(s);
}

// log of the exact transform int_0^inf exp(-rate t) exp(-a/t) dt
double laplace_log_kernel(double a, double rate) {
  if (!(rate > 0)) throw NumericError("laplace kernel form needs a positive decay rate");
  if (a <= 0.0) return -std::log(rate);
  const double z = 2.0 * std::sqrt(a * rate);
  return std::log(2.0) + 0.5 * (std::log(a) - std::log(rate)) + log_bessel_k1(z);
}

double f_at(const BackgroundState& bg, double xhat) {
  return sector_interp(bg.grid.x, bg.f_x, xhat);
}

double require_f(const BackgroundState& bg, double xhat) {
  const double f = f_at(bg, xhat);
  if (f == 0.0) throw ZeroF("short-term return density vanishes at the queried sector");
  return f;
}

}  // namespace

double shifted_capital_firm(const ModelSpec& spec, const BackgroundState& bg, double s, double K,
                            double X) {
  if (!spec.capital_channel) return K;
  const double kx = sector_interp(bg.grid.x, bg.K_X, X);
  return K - allocated_capital(spec, bg, s, kx, X);
}

double shifted_capital_investor(const ModelSpec& spec, const BackgroundState& bg, double khat,
                                double xhat) {
  const double f = require_f(bg, xhat);
  const double F = sector_interp(bg.grid.x, bg.F_x, xhat);
  return khat + spec.sigma_khat2 * F / (f * f);
}

FirmDrift drift_firm(const ModelSpec& spec, const BackgroundState& bg, const FirmQuery& q) {
  check_firm_query(bg.grid, q, false);
  FirmDrift d;
  d.d1 = sector_drift_firm(spec, bg, q);
  if (!spec.capital_channel) return d;

  const double s = q.initial.s;
  const double ki = q.initial.K;
  const double kf = q.final.K;
  const double xbar = 0.5 * (q.initial.X + q.final.X);
  const double khat_bar = sector_interp(bg.grid.x, bg.Khat_X, xbar);

  if (kf != ki) {
    auto excess = [&](double K) {
      return K - allocated_capital(spec, bg, s, K, xbar);
    };
    d.d2 = -integrate_segment(excess, ki, kf, q.path_subdiv);
  }

  const double dx = q.final.X - q.initial.X;
  if (dx != 0.0 && kf != ki && bg.grid.x.n >= 2) {
    const double h = 0.5 * bg.grid.x.dx;
    const double xa = std::max(bg.grid.x.lo, xbar - h);
    const double xb = std::min(bg.grid.x.hi, xbar + h);
    auto df2hat = [&](double K) {
      return (eval_F2hat(spec, bg, FirmCoord{K, xb, s}) -
              eval_F2hat(spec, bg, FirmCoord{K, xa, s})) /
             (xb - xa);
    };
    // both half-segments anchored at the midpoint capital so the term flips
    // sign with the path orientation
    const double kbar = 0.5 * (ki + kf);
    d.d3 = 0.5 * dx * khat_bar *
           (integrate_segment(df2hat, kbar, kf, q.path_subdiv) +
            integrate_segment(df2hat, kbar, ki, q.path_subdiv));
  }
  return d;
}

double alpha_eff_firm(const ModelSpec& spec, const BackgroundState& bg, const FirmQuery& q) {
  check_firm_query(bg.grid, q, false);
  const double comp_diff = competition_at(bg, q.final.K, q.final.X) -
                           competition_at(bg, q.initial.K, q.initial.X);
  const double tau_scale = spec.alpha_eff_variant == AlphaEffVariant::text ? 1.0 : 0.5;
  return q.alpha + bg.D_const + tau_scale * spec.tau * comp_diff +
         0.5 * spec.sigma_k2 * cross_pair(spec, bg, q);
}

TransitionResult firm_transition(const ModelSpec& spec, const BackgroundState& bg,
                                 const FirmQuery& q) {
  check_firm_query(bg.grid, q, false);
  const FirmDrift d = drift_firm(spec, bg, q);
  TransitionResult r;
  r.drift_parts[0] = d.d1;
  r.drift_parts[1] = d.d2;
  r.drift_parts[2] = d.d3;
  r.drift_D = d.d1 + d.d2 + d.d3;
  r.distance_term = scaled_distance_firm(spec, bg, q);
  if (spec.kernel_form == KernelForm::exponential) {
    r.alpha_eff = alpha_eff_firm(spec, bg, q);
    r.log_value = r.drift_D - r.alpha_eff * r.distance_term;
  } else {
    r.alpha_eff = laplace_rate_firm(spec, bg, q);
    r.log_value = r.drift_D + laplace_log_kernel(r.distance_term * r.distance_term, r.alpha_eff);
  }
  return r;
}

double firm_kernel_t(const ModelSpec& spec, const BackgroundState& bg, const FirmQuery& q) {
  check_firm_query(bg.grid, q, true);
  const double s = q.initial.s;
  const double comp_sum = competition_at(bg, q.final.K, q.final.X) +
                          competition_at(bg, q.initial.K, q.initial.X);
  double log_t = sector_drift_firm(spec, bg, q) - q.t * (bg.D_const + spec.tau * comp_sum);

  if (spec.capital_channel) {
    // endpoint capital factors referenced at the midpoint capital; they
    // collapse to the capital drift integral when both sectors coincide
    auto excess_at = [&](double X) {
      return [&, X](double K) { return K - allocated_capital(spec, bg, s, K, X); };
    };
    if (q.final.X == q.initial.X) {
      // merge the two half-segments so the discretization matches drift_firm
      log_t -= integrate_segment(excess_at(q.final.X), q.initial.K, q.final.K, q.path_subdiv);
    } else {
      const double kbar = 0.5 * (q.initial.K + q.final.K);
      log_t -= integrate_segment(excess_at(q.final.X), kbar, q.final.K, q.path_subdiv);
      log_t += integrate_segment(excess_at(q.initial.X), kbar, q.initial.K, q.path_subdiv);
    }
    log_t -= q.t * 0.5 * spec.sigma_k2 * cross_pair(spec, bg, q);
  }

  const double dist = scaled_distance_firm(spec, bg, q);
  log_t -= dist * dist / q.t;
  return std::exp(log_t);
}

InvestorDrift drift_investor_parts(const ModelSpec& spec, const BackgroundState& bg,
                                   const InvestorQuery& q) {
  check_investor_query(bg.grid, q, false);
  InvestorDrift d;
  if (q.final.Xhat != q.initial.Xhat && bg.grid.x.n >= 2) {
    auto g = [&](double X) { return sector_interp(bg.grid.x, bg.g_x, X); };
    d.path_g = integrate_segment(g, q.initial.Xhat, q.final.Xhat, q.path_subdiv) /
               spec.sigma_xhat2;
  }
  d.gain_f = q.final.Khat * q.final.Khat * f_at(bg, q.final.Xhat) / spec.sigma_khat2;
  d.gain_i = -q.initial.Khat * q.initial.Khat * f_at(bg, q.initial.Xhat) / spec.sigma_khat2;
  return d;
}

double drift_investor(const ModelSpec& spec, const BackgroundState& bg, const InvestorQuery& q) {
  const InvestorDrift d = drift_investor_parts(spec, bg, q);
  return d.path_g + d.gain_f + d.gain_i;
}

double relative_return_avg(const ModelSpec& spec, const BackgroundState& bg,
                           const InvestorQuery& q) {
  check_investor_query(bg.grid, q, false);
  const Axis& x = bg.grid.x;
  const std::vector<double> dg = central_diff(x, bg.g_x);
  auto integrand = [&](double X) {
    const double f = f_at(bg, X);
    if (f == 0.0) throw ZeroF("short-term return density vanishes on the path");
    const double g = sector_interp(x, bg.g_x, X);
    const double F = sector_interp(x, bg.F_x, X);
    const double dgv = sector_interp(x, dg, X);
    const double num = g * g + spec.sigma_xhat2 *
                                   (f + dgv - spec.sigma_khat2 * F * F / (2.0 * f * f));
    return num / (spec.sigma_xhat2 * std::abs(f));
  };
  const double xi = q.initial.Xhat;
  const double xf = q.final.Xhat;
  if (xf == xi) return integrand(xi);
  const double f0 = require_f(bg, xi);
  const double f1 = require_f(bg, xf);
  if (f0 * f1 < 0.0) throw ZeroF("short-term return density changes sign on the path");
  return integrate_segment(integrand, xi, xf, q.path_subdiv) / (xf - xi);
}

double alpha_eff_investor(const ModelSpec& spec, const BackgroundState& bg,
                          const InvestorQuery& q) {
  check_investor_query(bg.grid, q, false);
  const double yf = shifted_capital_investor(spec, bg, q.final.Khat, q.final.Xhat);
  const double yi = shifted_capital_investor(spec, bg, q.initial.Khat, q.initial.Xhat);
  const double fmid = require_f(bg, 0.5 * (q.initial.Xhat + q.final.Xhat));
  return (q.alpha + 0.5 * spec.sigma_xhat2 * yf * yi) *
             std::sqrt(std::abs(fmid) / (2.0 * spec.sigma_xhat2)) +
         relative_return_avg(spec, bg, q);
}

TransitionResult investor_transition(const ModelSpec& spec, const BackgroundState& bg,
                                     const InvestorQuery& q) {
  check_investor_query(bg.grid, q, false);
  const InvestorDrift d = drift_investor_parts(spec, bg, q);
  const double yf = shifted_capital_investor(spec, bg, q.final.Khat, q.final.Xhat);
  const double yi = shifted_capital_investor(spec, bg, q.initial.Khat, q.initial.Xhat);
  TransitionResult r;
  r.drift_parts[0] = d.path_g;
  r.drift_parts[1] = d.gain_f;
  r.drift_parts[2] = d.gain_i;
  r.drift_D = d.path_g + d.gain_f + d.gain_i;
  r.distance_term = std::abs(yf - yi);
  if (spec.kernel_form == KernelForm::exponential) {
    r.alpha_eff = alpha_eff_investor(spec, bg, q);
    r.log_value = r.drift_D - r.alpha_eff * r.distance_term;
  } else {
    const double fmid = require_f(bg, 0.5 * (q.initial.Xhat + q.final.Xhat));
    const double a = std::abs(fmid) * (yf - yi) * (yf - yi) / (2.0 * spec.sigma_xhat2);
    r.alpha_eff = q.alpha + relative_return_avg(spec, bg, q) +
                  0.5 * spec.sigma_xhat2 * yf * yi;
    r.log_value = r.drift_D + laplace_log_kernel(a, r.alpha_eff);
  }
  return r;
}

double investor_kernel_t(const ModelSpec& spec, const BackgroundState& bg,
                         const InvestorQuery& q) {
  check_investor_query(bg.grid, q, true);
  const double yf = shifted_capital_investor(spec, bg, q.final.Khat, q.final.Xhat);
  const double yi = shifted_capital_investor(spec, bg, q.initial.Khat, q.initial.Xhat);
  const double fmid = require_f(bg, 0.5 * (q.initial.Xhat + q.final.Xhat));
  const double gr = relative_return_avg(spec, bg, q);
  const InvestorDrift d = drift_investor_parts(spec, bg, q);
  const double a = std::abs(fmid) * (yf - yi) * (yf - yi) / (2.0 * spec.sigma_xhat2);
  const double log_t = -q.t * gr + d.path_g + d.gain_f + d.gain_i -
                       0.5 * spec.sigma_xhat2 * q.t * yf * yi - a / q.t;
  return std::exp(log_t);
}

std::vector<TransitionResult> firm_transition_batch(const ModelSpec& spec,
                                                    const BackgroundState& bg,
                                                    const std::vector<FirmQuery>& qs,
                                                    bool parallel) {
  std::vector<TransitionResult> out(qs.size());
  std::string err;
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(qs.size()); ++i) {
      try {
        out[i] = firm_transition(spec, bg, qs[i]);
      } catch (const std::exception& e) {
#pragma omp critical
        if (err.empty()) err = e.what();
      }
    }
  } else {
    for (std::size_t i = 0; i < qs.size(); ++i) out[i] = firm_transition(spec, bg, qs[i]);
  }
  if (!err.empty()) throw NumericError(err);
  return out;
}

std::vector<TransitionResult> investor_transition_batch(const ModelSpec& spec,
                                                        const BackgroundState& bg,
                                                        const std::vector<InvestorQuery>& qs,
                                                        bool parallel) {
  std::vector<TransitionResult> out(qs.size());
  std::string err;
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(qs.size()); ++i) {
      try {
        out[i] = investor_transition(spec, bg, qs[i]);
      } catch (const std::exception& e) {
#pragma omp critical
        if (err.empty()) err = e.what();
      }
    }
  } else {
    for (std::size_t i = 0; i < qs.size(); ++i) out[i] = investor_transition(spec, bg, qs[i]);
  }
  if (!err.empty()) throw NumericError(err);
  return out;
}

}  // namespace capfield
