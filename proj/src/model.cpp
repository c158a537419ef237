#include "capfield/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "capfield/common.hpp"
#include "capfield/quad.hpp"

namespace capfield {

void validate_model_spec(const ModelSpec& spec, const SectorGrid& grid) {
  if (spec.sigma_x2 <= 0 || spec.sigma_k2 <= 0 || spec.sigma_xhat2 <= 0 || spec.sigma_khat2 <= 0)
    throw ConfigError("all diffusion variances must be strictly positive");
  if (spec.tau < 0) throw ConfigError("tau must be >= 0");
  if (spec.gamma < 0) throw ConfigError("gamma must be >= 0");
  if (!(spec.epsilon > 0 && spec.epsilon < 1)) throw ConfigError("epsilon must lie in (0, 1)");
  if (spec.nu < 0) throw ConfigError("nu must be >= 0");
  if (spec.alpha <= 0) throw ConfigError("alpha must be > 0");
  if (spec.s_values.empty() || spec.s_values.size() != spec.s_weights.size())
    throw ConfigError("s_values and s_weights must be nonempty and of equal length");
  double wsum = 0.0;
  for (double w : spec.s_weights) {
    if (w < 0) throw ConfigError("s_weights must be nonnegative");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw ConfigError("s_weights must sum to 1");
  if (spec.n_firms_total <= 0) throw ConfigError("n_firms_total must be > 0");
  if (spec.firm_profile_width < 0) throw ConfigError("firm_profile_width must be >= 0");
  if (!(spec.fp_lambda > 0 && spec.fp_lambda <= 1)) throw ConfigError("fp_lambda must lie in (0, 1]");
  if (spec.fp_tol <= 0) throw ConfigError("fp_tol must be > 0");
  if (spec.fp_max_iter < 1) throw ConfigError("fp_max_iter must be >= 1");
  if (spec.crossing_order != 1)
    throw ConfigError("crossing_order > 1 is not supported (first-order crossing expansion only)");

  validate_funcdef(spec.funcs.R, "R", grid.k.lo, grid.k.hi);
  validate_funcdef(spec.funcs.r, "r", grid.k.lo, grid.k.hi);
  validate_funcdef(spec.funcs.H, "H", grid.k.lo, grid.k.hi);
  validate_funcdef(spec.funcs.F0, "F0", 1.0, 0.0);
  validate_funcdef(spec.funcs.F1, "F1", 1.0, 0.0);
  validate_funcdef(spec.funcs.F2, "F2", 1.0, 0.0);
  validate_funcdef(spec.nhat_of_x, "nhat_of_x", grid.x.lo, grid.x.hi);
  validate_funcdef(spec.A_of_x, "A_of_x", grid.x.lo, grid.x.hi);

  for (int ix = 0; ix < grid.x.n; ++ix)
    for (int ik = 0; ik < grid.k.n; ++ik) {
      const double v = eval_kx(spec.funcs.R, grid.k[ik], grid.x[ix]);
      if (!(v > 0)) throw ConfigError("R must be strictly positive on the grid");
      for (double s : spec.s_values)
        if (!(eval_scalar_s(spec.funcs.F2, s, v) > 0))
          throw ConfigError("F2 must be strictly positive over the grid's return range");
    }
}

double sector_interp(const Axis& x, const std::vector<double>& v, double at) {
  if (at <= x.lo) return v.front();
  if (at >= x.hi) return v.back();
  const double u = (at - x.lo) / x.dx;
  const int j = std::min(static_cast<int>(u), x.n - 2);
  const double t = u - j;
  return (1.0 - t) * v[j] + t * v[j + 1];
}

std::vector<double> firm_profile_at(const BackgroundState& bg, double x) {
  const Axis& ax = bg.grid.x;
  const int kn = bg.grid.k.n;
  std::vector<double> out(kn);
  double u = (x - ax.lo) / ax.dx;
  u = std::clamp(u, 0.0, static_cast<double>(ax.n - 1));
  const int j = std::min(static_cast<int>(u), ax.n - 2);
  const double t = u - j;
  for (int ik = 0; ik < kn; ++ik)
    out[ik] = (1.0 - t) * bg.psi2_kx[bg.grid.idx_kx(j, ik)] + t * bg.psi2_kx[bg.grid.idx_kx(j + 1, ik)];
  return out;
}

double f2_s_avg(const ModelSpec& spec, double v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.s_values.size(); ++i)
    acc += spec.s_weights[i] * eval_scalar_s(spec.funcs.F2, spec.s_values[i], v);
  return acc;
}

// denominator of the relative attractiveness at sector x
double f2_denominator(const ModelSpec& spec, const BackgroundState& bg, double x,
                      const std::vector<double>& profile) {
  const Axis& k = bg.grid.k;
  std::vector<double> integrand(k.n);
  for (int ik = 0; ik < k.n; ++ik)
    integrand[ik] = f2_s_avg(spec, eval_kx(spec.funcs.R, k[ik], x)) * profile[ik];
  return trapz(k, integrand);
}

double return_normalizer(const ModelSpec& spec, const BackgroundState& bg) {
  const Axis& x = bg.grid.x;
  const Axis& k = bg.grid.k;
  std::vector<double> per_sector(x.n);
  std::vector<double> col(k.n);
  for (int ix = 0; ix < x.n; ++ix) {
    for (int ik = 0; ik < k.n; ++ik)
      col[ik] = eval_kx(spec.funcs.R, k[ik], x[ix]) * bg.psi2_kx[bg.grid.idx_kx(ix, ik)];
    per_sector[ix] = trapz(k, col);
  }
  return trapz(x, per_sector);
}

double eval_F2hat(const ModelSpec& spec, const BackgroundState& bg, const FirmCoord& at) {
  const std::vector<double> profile = firm_profile_at(bg, at.X);
  const double denom = f2_denominator(spec, bg, at.X, profile);
  if (!(denom > 0))
    throw ZeroDenominator("no firm density at the queried sector");
  const double v = eval_kx(spec.funcs.R, at.K, at.X);
  return eval_scalar_s(spec.funcs.F2, at.s, v) / denom;
}

double eval_Gamma(const ModelSpec& spec, const BackgroundState& bg, const FirmCoord& at) {
  const double khat = sector_interp(bg.grid.x, bg.Khat_X, at.X);
  return eval_F2hat(spec, bg, at) * khat / at.K - 1.0;
}

double eval_u(const ModelSpec& spec, const BackgroundState& bg, const FirmCoord& at) {
  const double khat = sector_interp(bg.grid.x, bg.Khat_X, at.X);
  return (at.K - eval_F2hat(spec, bg, at) * khat) / spec.epsilon;
}

double eval_f(const ModelSpec& spec, const BackgroundState& bg, double xhat) {
  const Axis& k = bg.grid.k;
  const std::vector<double> profile = firm_profile_at(bg, xhat);
  const double denom = f2_denominator(spec, bg, xhat, profile);
  if (!(denom > 0))
    throw ZeroDenominator("no firm density at the queried sector");
  const double z_r = return_normalizer(spec, bg);
  if (!(z_r > 0))
    throw ZeroDenominator("total-return normalizer integrates to zero");
  const double khat = sector_interp(bg.grid.x, bg.Khat_X, xhat);

  std::vector<double> kcol(k.n);
  for (int ik = 0; ik < k.n; ++ik) kcol[ik] = k[ik] * profile[ik];
  const double capital_total = trapz(k, kcol);

  std::vector<double> integrand(k.n);
  for (int ik = 0; ik < k.n; ++ik) {
    const double kk = k[ik];
    const double v = eval_kx(spec.funcs.R, kk, xhat);
    const double f2h = f2_s_avg(spec, v) / denom;
    const double gamma_kx = f2h * khat / kk - 1.0;
    const double f1 = eval_scalar(spec.funcs.F1, v / z_r) + spec.funcs.F1.gamma_coupling * gamma_kx;
    const double gain = eval_kx(spec.funcs.r, kk, xhat) - spec.gamma * capital_total / kk + f1;
    integrand[ik] = gain * f2h * profile[ik];
  }
  return trapz(k, integrand) / spec.epsilon;
}

double eval_g(const ModelSpec& spec, const BackgroundState& bg, double xhat) {
  const Axis& x = bg.grid.x;
  const Axis& k = bg.grid.k;
  const double z_r = spec.nu != 0.0 ? return_normalizer(spec, bg) : 1.0;
  if (!(z_r > 0))
    throw ZeroDenominator("total-return normalizer integrates to zero");

  // X-gradient of F0(R) + nu F1(Rbar) at fixed K, then density-weighted K average
  std::vector<double> w(x.n), dw(x.n), gx(x.n), integrand(k.n), nx(x.n);
  std::vector<std::vector<double>> dw_k(static_cast<std::size_t>(k.n));
  for (int ik = 0; ik < k.n; ++ik) {
    for (int ix = 0; ix < x.n; ++ix) {
      const double v = eval_kx(spec.funcs.R, k[ik], x[ix]);
      w[ix] = eval_scalar(spec.funcs.F0, v);
      if (spec.nu != 0.0) w[ix] += spec.nu * eval_scalar(spec.funcs.F1, v / z_r);
    }
    dw_k[static_cast<std::size_t>(ik)] = central_diff(x, w);
  }
  for (int ix = 0; ix < x.n; ++ix) {
    std::vector<double> col(k.n);
    for (int ik = 0; ik < k.n; ++ik) {
      const double rho = bg.psi2_kx[bg.grid.idx_kx(ix, ik)];
      integrand[ik] = dw_k[static_cast<std::size_t>(ik)][ix] * rho;
      col[ik] = rho;
    }
    nx[ix] = trapz(k, col);
    gx[ix] = nx[ix] > 0 ? trapz(k, integrand) / nx[ix] : 0.0;
  }
  const double n_here = sector_interp(x, nx, xhat);
  if (!(n_here > 0))
    throw ZeroDenominator("no firm density at the queried sector");
  return sector_interp(x, gx, xhat);
}

}  // namespace capfield
