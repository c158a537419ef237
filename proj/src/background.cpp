#include "capfield/background.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "capfield/common.hpp"
#include "capfield/quad.hpp"
#include "capfield/specfun.hpp"

namespace capfield {

namespace {

// trapezoid node weight; single-node axes carry a unit counting measure
double node_weight(const Axis& x, int i) {
  if (x.n == 1) return 1.0;
  return (i == 0 || i == x.n - 1) ? 0.5 * x.dx : x.dx;
}

std::vector<double> r_along_kx(const ModelSpec& spec, const SectorGrid& grid,
                               const std::vector<double>& K_X) {
  std::vector<double> rx(grid.x.n);
  for (int i = 0; i < grid.x.n; ++i) rx[i] = eval_kx(spec.funcs.R, K_X[i], grid.x[i]);
  return rx;
}

// partial x-derivatives of R at held capital K = K_X(x); holding K keeps
// grid-scale noise in the capital field out of the curvature term
void partial_x_stencils(const ModelSpec& spec, const SectorGrid& grid,
                        const std::vector<double>& K_X, std::vector<double>& drx,
                        std::vector<double>& d2rx) {
  const int n = grid.x.n;
  drx.assign(n, 0.0);
  d2rx.assign(n, 0.0);
  if (n < 2) return;
  const double h = grid.x.dx;
  if (n == 2) {
    for (int i = 0; i < 2; ++i)
      drx[i] = (eval_kx(spec.funcs.R, K_X[i], grid.x[1]) -
                eval_kx(spec.funcs.R, K_X[i], grid.x[0])) /
               h;
    return;
  }
  for (int i = 0; i < n; ++i) {
    auto rat = [&](int j) { return eval_kx(spec.funcs.R, K_X[i], grid.x[j]); };
    if (i == 0) {
      drx[i] = (-3.0 * rat(0) + 4.0 * rat(1) - rat(2)) / (2.0 * h);
      d2rx[i] = n >= 4 ? (2.0 * rat(0) - 5.0 * rat(1) + 4.0 * rat(2) - rat(3)) / (h * h)
                       : (rat(0) - 2.0 * rat(1) + rat(2)) / (h * h);
    } else if (i == n - 1) {
      drx[i] = (3.0 * rat(i) - 4.0 * rat(i - 1) + rat(i - 2)) / (2.0 * h);
      d2rx[i] = n >= 4 ? (2.0 * rat(i) - 5.0 * rat(i - 1) + 4.0 * rat(i - 2) - rat(i - 3)) /
                             (h * h)
                       : (rat(i) - 2.0 * rat(i - 1) + rat(i - 2)) / (h * h);
    } else {
      drx[i] = (rat(i + 1) - rat(i - 1)) / (2.0 * h);
      d2rx[i] = (rat(i + 1) - 2.0 * rat(i) + rat(i - 1)) / (h * h);
    }
  }
}

double sector_return_normalizer(const SectorGrid& grid, const std::vector<double>& rx,
                                const std::vector<double>& psi2_x) {
  std::vector<double> tmp(rx.size());
  for (std::size_t i = 0; i < rx.size(); ++i) tmp[i] = rx[i] * psi2_x[i];
  return sector_integral(grid.x, tmp);
}

double dH_dk(const FuncDef& H, double k, double x) {
  const double h = 1e-6 * std::max(1.0, std::fabs(k));
  return (eval_kx(H, k + h, x) - eval_kx(H, k - h, x)) / (2.0 * h);
}

void check_kx_size(const SectorGrid& grid, const std::vector<double>& K_X, const char* who) {
  if (static_cast<int>(K_X.size()) != grid.x.n)
    throw ConfigError(std::string(who) + ": K_X size does not match the sector axis");
}

}  // namespace

double sector_integral(const Axis& x, const std::vector<double>& v) {
  if (x.n == 1) return v.empty() ? 0.0 : v[0];
  return trapz(x, v);
}

FirmDensityResult firm_density(const ModelSpec& spec, const SectorGrid& grid,
                               const std::vector<double>& K_X, double D) {
  if (!(spec.tau > 0.0)) throw NonPositiveTau("firm density: tau must be positive");
  check_kx_size(grid, K_X, "firm density");

  std::vector<double> drx, d2rx;
  partial_x_stencils(spec, grid, K_X, drx, d2rx);

  FirmDensityResult out;
  out.psi2_x.resize(grid.x.n);
  for (int i = 0; i < grid.x.n; ++i) {
    const double H = eval_kx(spec.funcs.H, K_X[i], grid.x[i]);
    if (!(H > 0.0))
      throw NumericError("firm density: H(K_X) must be positive at x=" +
                         std::to_string(grid.x[i]));
    const double Hp = dH_dk(spec.funcs.H, K_X[i], grid.x[i]);
    const double curvature = drx[i] * drx[i] + spec.sigma_x2 * d2rx[i] / H;
    const double val = D / (2.0 * spec.tau) -
                       curvature * (1.0 - Hp * K_X[i] / H) * H * H / (4.0 * spec.tau);
    out.psi2_x[i] = std::max(0.0, val);
  }
  for (int i = 0; i < grid.x.n; ++i) {
    const double w = node_weight(grid.x, i);
    out.V += w;
    if (out.psi2_x[i] == 0.0) out.V0 += w;
  }
  return out;
}

std::vector<double> background_f(const ModelSpec& spec, const SectorGrid& grid,
                                 const std::vector<double>& K_X,
                                 const std::vector<double>& psi2_x) {
  check_kx_size(grid, K_X, "background f");
  const auto rx = r_along_kx(spec, grid, K_X);
  const double rnorm = sector_return_normalizer(grid, rx, psi2_x);
  if (!(rnorm > 0.0))
    throw ZeroDenominator("background f: sector integral of R psi2 is not positive");

  std::vector<double> f(grid.x.n);
  for (int i = 0; i < grid.x.n; ++i) {
    const double short_term = eval_kx(spec.funcs.r, K_X[i], grid.x[i]);
    const double long_term = eval_scalar(spec.funcs.F1, rx[i] / rnorm);
    f[i] = (short_term - spec.gamma * psi2_x[i] + long_term) / spec.epsilon;
  }
  return f;
}

std::vector<double> background_g(const ModelSpec& spec, const SectorGrid& grid,
                                 const std::vector<double>& K_X,
                                 const std::vector<double>& psi2_x) {
  check_kx_size(grid, K_X, "background g");
  const auto rx = r_along_kx(spec, grid, K_X);
  double rnorm = 1.0;
  if (spec.nu != 0.0) {
    rnorm = sector_return_normalizer(grid, rx, psi2_x);
    if (!(rnorm > 0.0))
      throw ZeroDenominator("background g: sector integral of R psi2 is not positive");
  }

  // sector gradient of F0(R) + nu F1(R/rnorm) at held capital K_X(x)
  const int n = grid.x.n;
  std::vector<double> g(n, 0.0);
  if (n < 2) return g;
  const double h = grid.x.dx;
  for (int i = 0; i < n; ++i) {
    auto wat = [&](int j) {
      const double rv = eval_kx(spec.funcs.R, K_X[i], grid.x[j]);
      double w = eval_scalar(spec.funcs.F0, rv);
      if (spec.nu != 0.0) w += spec.nu * eval_scalar(spec.funcs.F1, rv / rnorm);
      return w;
    };
    if (n == 2)
      g[i] = (wat(1) - wat(0)) / h;
    else if (i == 0)
      g[i] = (-3.0 * wat(0) + 4.0 * wat(1) - wat(2)) / (2.0 * h);
    else if (i == n - 1)
      g[i] = (3.0 * wat(i) - 4.0 * wat(i - 1) + wat(i - 2)) / (2.0 * h);
    else
      g[i] = (wat(i + 1) - wat(i - 1)) / (2.0 * h);
  }
  return g;
}

std::vector<double> background_F(const ModelSpec& spec, const SectorGrid& grid,
                                 const std::vector<double>& K_X,
                                 const std::vector<double>& psi2_x,
                                 const std::vector<double>& khat2_prev) {
  std::vector<double> F(grid.x.n, 0.0);
  if (spec.neglect_kxhat_derivatives) return F;

  for (int j = 0; j < grid.x.n; ++j) {
    if (!(psi2_x[j] > 0.0)) continue;
    const double h = std::min(1e-4 * std::max(1.0, K_X[j]), 0.5 * K_X[j]);
    auto kp = K_X;
    auto km = K_X;
    kp[j] += h;
    km[j] -= h;

    const auto fp = background_f(spec, grid, kp, psi2_x);
    const auto fm = background_f(spec, grid, km, psi2_x);
    const auto gp = background_g(spec, grid, kp, psi2_x);
    const auto gm = background_g(spec, grid, km, psi2_x);
    const auto dgp = central_diff(grid.x, gp);
    const auto dgm = central_diff(grid.x, gm);

    const double ap =
        gp[j] * gp[j] / (2.0 * spec.sigma_xhat2) + 0.5 * dgp[j] + fp[j];
    const double am =
        gm[j] * gm[j] / (2.0 * spec.sigma_xhat2) + 0.5 * dgm[j] + fm[j];
    const double d_action = (ap - am) / (2.0 * h);
    const double d_f2 = (fp[j] * fp[j] - fm[j] * fm[j]) / (2.0 * h);

    const double nhat = eval_scalar(spec.nhat_of_x, grid.x[j]);
    const double khat2 = khat2_prev.empty() ? 0.0 : khat2_prev[j];
    F[j] = d_action * nhat / psi2_x[j] +
           d_f2 * khat2 / (spec.sigma_khat2 * psi2_x[j]);
  }
  return F;
}

InvestorDensityResult investor_density(const ModelSpec& spec, const SectorGrid& grid,
                                       const BackgroundState& bg) {
  const int nx = grid.x.n;
  const int nkh = grid.khat.n;
  if (static_cast<int>(bg.f_x.size()) != nx || static_cast<int>(bg.p_x.size()) != nx ||
      static_cast<int>(bg.F_x.size()) != nx || static_cast<int>(bg.Nhat_X.size()) != nx)
    throw ConfigError("investor density: background scalars not sized to the sector axis");

  const auto fprime = central_diff(grid.x, bg.f_x);

  InvestorDensityResult out;
  out.psihat2.assign(static_cast<std::size_t>(nx) * nkh, 0.0);
  double scale_sum = 0.0;

  std::vector<double> raw(nkh);
  for (int j = 0; j < nx; ++j) {
    const double f = bg.f_x[j];
    const bool firms_here = bg.psi2_x.empty() ? true : bg.psi2_x[j] > 0.0;
    if (f == 0.0) {
      if (firms_here || bg.Nhat_X[j] > 0.0)
        throw ZeroF("investor density: f(X)=0 at x=" + std::to_string(grid.x[j]));
      continue;
    }
    const double af = std::fabs(f);
    const double zfac = std::sqrt(af / spec.sigma_khat2);
    const double shift = spec.sigma_khat2 * bg.F_x[j] / (f * f);
    const double pref = spec.sigma_x2 * fprime[j] * fprime[j] / (96.0 * spec.sigma_khat2 * af);

    for (int i = 0; i < nkh; ++i) {
      const double kh = grid.khat[i];
      const double d = pcf(bg.p_x[j], zfac * (kh + shift));
      raw[i] = std::exp(-pref * kh * kh * kh * kh) * d * d;
    }
    const double z_norm = trapz(grid.khat, raw);
    if (!(z_norm > 0.0) || !std::isfinite(z_norm))
      throw NumericError("investor density: normalization integral degenerate at x=" +
                         std::to_string(grid.x[j]));
    const double scale = bg.Nhat_X[j] / z_norm;
    scale_sum += scale;
    for (int i = 0; i < nkh; ++i) out.psihat2[grid.idx_khx(j, i)] = scale * raw[i];
  }
  out.C_mean = scale_sum / nx;
  return out;
}

double compute_D_const(const ModelSpec& spec, const BackgroundState& bg) {
  const SectorGrid& grid = bg.grid;
  if (!(bg.V > bg.V0))
    throw DegenerateVolume("D constant: sector volume does not exceed the zero-density locus");

  const double N = spec.n_firms_total;
  const double crowding = 2.0 * spec.tau * N / (bg.V - bg.V0);

  std::vector<double> drx, d2rx;
  partial_x_stencils(spec, grid, bg.K_X, drx, d2rx);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < grid.x.n; ++i) {
    if (!(bg.psi2_x[i] > 0.0)) continue;
    const double w = node_weight(grid.x, i);
    num += w * drx[i] * drx[i];
    den += w;
  }
  const double grad2_avg = den > 0.0 ? num / den : 0.0;

  const double khat_total = sector_integral(grid.x, bg.Khat_X);
  const double kbar = khat_total / N;
  const double H = eval_scalar(spec.funcs.H, kbar);
  if (!(H > 0.0)) throw NumericError("D constant: H at the mean capital must be positive");
  const double hstep = 1e-6 * std::max(1.0, std::fabs(kbar));
  const double Hp =
      (eval_scalar(spec.funcs.H, kbar + hstep) - eval_scalar(spec.funcs.H, kbar - hstep)) /
      (2.0 * hstep);

  const double D =
      crowding + 0.5 / spec.sigma_x2 * grad2_avg * H * H * (1.0 - Hp * kbar / H);
  return std::max(0.0, D);
}

namespace {

// Gaussian capital profile on the (truncated) K axis whose discrete mean hits
// the target; bisection on the center, which moves the mean monotonically.
std::vector<double> fit_capital_profile(const Axis& k, double width, double target) {
  std::vector<double> phi(k.n);
  auto fill = [&](double c) {
    for (int i = 0; i < k.n; ++i) {
      const double t = (k[i] - c) / width;
      phi[i] = std::exp(-0.5 * t * t);
    }
  };
  auto mean_of = [&](double c) {
    fill(c);
    double m0 = 0.0, m1 = 0.0;
    for (int i = 0; i < k.n; ++i) {
      const double w = node_weight(k, i);
      m0 += w * phi[i];
      m1 += w * k[i] * phi[i];
    }
    return m1 / m0;
  };

  double clo = k.lo - 6.0 * width;
  double chi = k.hi + 6.0 * width;
  if (!(target > mean_of(clo)) || !(target < mean_of(chi)))
    throw NumericError("firm profile: mean capital " + std::to_string(target) +
                       " not representable on the capital axis");
  for (int it = 0; it < 200; ++it) {
    const double c = 0.5 * (clo + chi);
    const double m = mean_of(c);
    if (std::fabs(m - target) < 1e-13 * std::max(1.0, std::fabs(target))) break;
    (m < target ? clo : chi) = c;
    if (chi - clo < 1e-15 * (k.hi - k.lo)) break;
  }
  fill(0.5 * (clo + chi));
  return phi;
}

void build_capital_profiles(const ModelSpec& spec, BackgroundState& bg) {
  const Axis& k = bg.grid.k;
  const double width =
      spec.firm_profile_width > 0.0 ? spec.firm_profile_width : (k.hi - k.lo) / 8.0;
  bg.psi2_kx.assign(static_cast<std::size_t>(bg.grid.x.n) * k.n, 0.0);
  for (int j = 0; j < bg.grid.x.n; ++j) {
    if (!(bg.N_X[j] > 0.0)) continue;
    auto phi = fit_capital_profile(k, width, bg.K_X[j]);
    const double z = trapz(k, phi);
    const double scale = bg.N_X[j] / z;
    for (int i = 0; i < k.n; ++i) bg.psi2_kx[bg.grid.idx_kx(j, i)] = scale * phi[i];
  }
}

}  // namespace

BackgroundState solve_selfconsistent(const ModelSpec& spec, const SectorGrid& grid,
                                     const std::vector<double>& init_KX) {
  validate_grid(grid);
  validate_model_spec(spec, grid);
  check_kx_size(grid, init_KX, "background solve");
  for (double v : init_KX)
    if (!(v > 0.0)) throw ConfigError("background solve: init_KX must be positive");

  const int nx = grid.x.n;
  BackgroundState bg;
  bg.grid = grid;
  bg.M_param = spec.M_param;
  bg.A_x.resize(nx);
  bg.Nhat_X.resize(nx);
  for (int j = 0; j < nx; ++j) {
    bg.A_x[j] = eval_scalar(spec.A_of_x, grid.x[j]);
    bg.Nhat_X[j] = eval_scalar(spec.nhat_of_x, grid.x[j]);
    if (!(bg.Nhat_X[j] >= 0.0))
      throw ConfigError("background solve: investor count per sector must be nonnegative");
  }

  std::vector<double> KX = init_KX;
  std::vector<double> khat2_prev;

  // crude starting crowding constant: no clipped volume yet, mean capital
  // from the initializer
  double D;
  {
    double V = 0.0;
    for (int i = 0; i < nx; ++i) V += node_weight(grid.x, i);
    std::vector<double> drx, d2rx;
    partial_x_stencils(spec, grid, KX, drx, d2rx);
    std::vector<double> g2(nx);
    for (int i = 0; i < nx; ++i) g2[i] = drx[i] * drx[i];
    const double grad2_avg = sector_integral(grid.x, g2) / V;
    double kbar = 0.0;
    for (double v : KX) kbar += v;
    kbar /= nx;
    const double H = eval_scalar(spec.funcs.H, kbar);
    const double hstep = 1e-6 * std::max(1.0, std::fabs(kbar));
    const double Hp =
        (eval_scalar(spec.funcs.H, kbar + hstep) - eval_scalar(spec.funcs.H, kbar - hstep)) /
        (2.0 * hstep);
    D = std::max(0.0, 2.0 * spec.tau * spec.n_firms_total / V +
                          0.5 / spec.sigma_x2 * grad2_avg * H * H * (1.0 - Hp * kbar / H));
  }

  std::vector<double> KX_new(nx);
  for (int iter = 1; iter <= spec.fp_max_iter; ++iter) {
    auto fd = firm_density(spec, grid, KX, D);
    if (!(fd.V > fd.V0))
      throw DegenerateVolume("background solve: firm density vanished everywhere");

    bg.psi2_x = fd.psi2_x;
    bg.V = fd.V;
    bg.V0 = fd.V0;
    bg.K_X = KX;
    bg.f_x = background_f(spec, grid, KX, fd.psi2_x);
    bg.g_x = background_g(spec, grid, KX, fd.psi2_x);
    bg.F_x = background_F(spec, grid, KX, fd.psi2_x, khat2_prev);
    bg.p_x.resize(nx);
    for (int j = 0; j < nx; ++j)
      bg.p_x[j] =
          bg.f_x[j] == 0.0 ? 0.0 : (spec.M_param - bg.A_x[j]) / std::fabs(bg.f_x[j]);

    auto inv = investor_density(spec, grid, bg);
    bg.psihat2 = std::move(inv.psihat2);
    bg.C_norm = inv.C_mean;

    bg.Khat_X.resize(nx);
    bg.khat_second_moment.resize(nx);
    std::vector<double> row(grid.khat.n);
    for (int j = 0; j < nx; ++j) {
      for (int i = 0; i < grid.khat.n; ++i)
        row[i] = grid.khat[i] * bg.psihat2[grid.idx_khx(j, i)];
      bg.Khat_X[j] = trapz(grid.khat, row);
      for (int i = 0; i < grid.khat.n; ++i) row[i] *= grid.khat[i];
      bg.khat_second_moment[j] =
          bg.Nhat_X[j] > 0.0 ? trapz(grid.khat, row) / bg.Nhat_X[j] : 0.0;
    }

    const double D_new = compute_D_const(spec, bg);

    double residual = 0.0;
    for (int j = 0; j < nx; ++j) {
      if (fd.psi2_x[j] > 0.0 && bg.Khat_X[j] > 0.0) {
        KX_new[j] = bg.Khat_X[j] / fd.psi2_x[j];
        residual = std::max(residual,
                            std::fabs(KX_new[j] - KX[j]) / std::max(std::fabs(KX[j]), 1e-12));
      } else {
        KX_new[j] = KX[j];
      }
    }
    bg.residual_history.push_back(residual);

    if (residual < spec.fp_tol) {
      bg.K_X = KX_new;
      bg.D_const = D_new;
      bg.N_X = bg.psi2_x;
      bg.iterations = iter;
      bg.residual = residual;
      build_capital_profiles(spec, bg);
      CF_LOG_INFO("background solve converged in %d iterations, residual %.3e", iter, residual);
      return bg;
    }

    for (int j = 0; j < nx; ++j)
      KX[j] = (1.0 - spec.fp_lambda) * KX[j] + spec.fp_lambda * KX_new[j];
    D = (1.0 - spec.fp_lambda) * D + spec.fp_lambda * D_new;
    khat2_prev = bg.khat_second_moment;
  }
  throw NoConvergence("background solve: fixed point did not reach tolerance",
                      bg.residual_history);
}

}  // namespace capfield
