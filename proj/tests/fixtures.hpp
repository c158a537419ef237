#pragma once
#include <cmath>
#include <vector>

#include "capfield/background.hpp"
#include "capfield/model.hpp"
#include "capfield/quad.hpp"

namespace capfield_test {

using namespace capfield;

inline SectorGrid make_grid(int nx, int nk, int nkh, double xlo = -1.0, double xhi = 1.0) {
  SectorGrid g;
  g.x = Axis::linspace(xlo, xhi, nx);
  g.k = Axis::linspace(0.5, 8.0, nk);
  g.khat = Axis::linspace(0.05, 12.0, nkh);
  return g;
}

// smooth non-uniform economy used by most drift tests
inline ModelSpec smooth_spec() {
  ModelSpec spec;
  spec.tau = 0.2;
  spec.gamma = 0.008;
  spec.epsilon = 0.5;
  spec.nu = 0.25;
  spec.alpha = 1.0;
  spec.n_firms_total = 6.0;
  spec.nhat_of_x = FuncDef::constant_fn(15.0);
  spec.funcs.R = FuncDef::power_fn(1.6, 0.35);
  spec.funcs.R.mod_amp = 0.12;
  spec.funcs.R.mod_freq = 1.1;
  spec.funcs.R.mod_phase = 0.5;
  spec.funcs.r = FuncDef::affine_fn(0.3, 0.004);
  spec.funcs.H = FuncDef::affine_fn(1.0, 0.0);
  spec.funcs.F0 = FuncDef::affine_fn(0.8, 0.15);
  spec.funcs.F1 = FuncDef::affine_fn(0.02, 0.01);
  spec.funcs.F2 = FuncDef::logistic_fn(0.7, 1.3, 1.2, 1.0);
  return spec;
}

// sector-uniform economy: R depends on capital only, so all x-profiles are flat
inline ModelSpec uniform_spec() {
  ModelSpec spec;
  spec.tau = 0.1;
  spec.gamma = 0.01;
  spec.epsilon = 0.5;
  spec.nu = 0.0;
  spec.alpha = 1.2;
  spec.n_firms_total = 6.0;
  spec.nhat_of_x = FuncDef::constant_fn(15.0);
  spec.funcs.R = FuncDef::power_fn(2.0, 0.3);
  spec.funcs.r = FuncDef::affine_fn(0.4, 0.01);
  spec.funcs.H = FuncDef::affine_fn(1.0, 0.0);
  spec.funcs.F0 = FuncDef::affine_fn(1.0, 0.0);
  spec.funcs.F1 = FuncDef::affine_fn(0.01, 0.0);
  spec.funcs.F2 = FuncDef::logistic_fn(0.6, 1.4, 2.0, 1.5);
  return spec;
}

// depressed returns push the investor restoring coefficient negative
inline ModelSpec negative_f_spec() {
  ModelSpec spec;
  spec.tau = 0.15;
  spec.gamma = 0.15;
  spec.epsilon = 0.5;
  spec.nu = 0.0;
  spec.alpha = 1.0;
  spec.n_firms_total = 6.0;
  spec.nhat_of_x = FuncDef::constant_fn(15.0);
  spec.funcs.R = FuncDef::power_fn(1.8, 0.3);
  spec.funcs.R.mod_amp = 0.05;
  spec.funcs.R.mod_freq = 1.0;
  spec.funcs.r = FuncDef::affine_fn(0.02, 0.001);
  spec.funcs.H = FuncDef::affine_fn(1.0, 0.0);
  spec.funcs.F0 = FuncDef::affine_fn(1.0, 0.0);
  spec.funcs.F1 = FuncDef::affine_fn(0.005, 0.0);
  spec.funcs.F2 = FuncDef::logistic_fn(0.6, 1.4, 1.5, 1.2);
  return spec;
}

struct Economy {
  ModelSpec spec;
  BackgroundState bg;
};

inline const Economy& smooth_economy() {
  static Economy e = [] {
    Economy out;
    out.spec = smooth_spec();
    SectorGrid grid = make_grid(41, 76, 481);
    out.bg = solve_selfconsistent(out.spec, grid, std::vector<double>(grid.x.n, 2.0));
    return out;
  }();
  return e;
}

inline const Economy& uniform_economy() {
  static Economy e = [] {
    Economy out;
    out.spec = uniform_spec();
    SectorGrid grid = make_grid(21, 96, 481);
    out.bg = solve_selfconsistent(out.spec, grid, std::vector<double>(grid.x.n, 2.0));
    return out;
  }();
  return e;
}

inline const Economy& negative_f_economy() {
  static Economy e = [] {
    Economy out;
    out.spec = negative_f_spec();
    SectorGrid grid = make_grid(31, 76, 481);
    out.bg = solve_selfconsistent(out.spec, grid, std::vector<double>(grid.x.n, 2.0));
    return out;
  }();
  return e;
}

// hand-built state with every collective profile flat: the transition layer
// should reduce to free-particle kernels on top of it
inline BackgroundState flat_background(const SectorGrid& g, double d_const, double psi2,
                                       double kx, double khat_total, double f_val, double g_val,
                                       double cap_f) {
  BackgroundState bg;
  bg.grid = g;
  bg.psi2_x.assign(g.x.n, psi2);
  bg.psi2_kx.assign(static_cast<size_t>(g.x.n) * g.k.n, psi2 / (g.k.hi - g.k.lo));
  bg.psihat2.assign(static_cast<size_t>(g.x.n) * g.khat.n, 0.0);
  bg.K_X.assign(g.x.n, kx);
  bg.Khat_X.assign(g.x.n, khat_total);
  bg.N_X.assign(g.x.n, psi2);
  bg.Nhat_X.assign(g.x.n, 1.0);
  bg.khat_second_moment.assign(g.x.n, 0.0);
  bg.f_x.assign(g.x.n, f_val);
  bg.g_x.assign(g.x.n, g_val);
  bg.F_x.assign(g.x.n, cap_f);
  bg.p_x.assign(g.x.n, 0.0);
  bg.A_x.assign(g.x.n, 0.0);
  bg.M_param = 0.0;
  bg.C_norm = 1.0;
  bg.D_const = d_const;
  bg.V = g.x.hi - g.x.lo;
  bg.V0 = 0.0;
  bg.iterations = 0;
  bg.residual = 0.0;
  return bg;
}

inline double interp_at(const BackgroundState& bg, const std::vector<double>& field, double x) {
  return sector_interp(bg.grid.x, field, x);
}

// dense reference transform: composite Simpson on (0, t_hi]; the time kernels
// vanish as t -> 0 whenever the endpoints are separated
template <typename F>
double laplace_ref(F&& f, double alpha, double t_hi, int n = 20000) {
  const double h = t_hi / n;
  std::vector<double> vals(n + 1);
  vals[0] = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double t = i * h;
    vals[i] = std::exp(-alpha * t) * f(t);
  }
  return simpson(h, vals);
}

}  // namespace capfield_test
