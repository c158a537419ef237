#pragma once
#include <vector>

#include "capfield/functions.hpp"
#include "capfield/grid.hpp"

namespace capfield {

enum class AlphaEffVariant { text, appendix };
enum class KernelForm { exponential, laplace };

struct ModelSpec {
  double sigma_x2 = 1.0;
  double sigma_k2 = 1.0;
  double sigma_xhat2 = 1.0;
  double sigma_khat2 = 1.0;
  double tau = 0.1;      // sector competition strength
  double gamma = 0.0;    // decreasing-returns coefficient
  double epsilon = 0.5;  // capital accumulation time scale
  double nu = 0.0;       // price-gradient weight in the investor drift
  double alpha = 1.0;    // inverse mean lifespan

  std::vector<double> s_values{1.0};
  std::vector<double> s_weights{1.0};
  FunctionSet funcs;

  double n_firms_total = 10.0;
  FuncDef nhat_of_x = FuncDef::constant_fn(1.0);  // investor count per sector
  double M_param = 0.0;                           // exogenous offset in p(X)
  FuncDef A_of_x = FuncDef::constant_fn(0.0);     // exogenous shift in p(X)
  double firm_profile_width = 0.0;                // 0 = span/8 of the K axis

  double fp_lambda = 0.3;
  double fp_tol = 1e-8;
  int fp_max_iter = 10000;

  AlphaEffVariant alpha_eff_variant = AlphaEffVariant::appendix;
  KernelForm kernel_form = KernelForm::exponential;
  bool neglect_kxhat_derivatives = true;
  bool capital_channel = true;
  bool tau_capital_weighted = false;
  int crossing_order = 1;
};

struct FirmCoord {
  double K = 1.0;
  double X = 0.0;
  double s = 1.0;
};

struct InvestorCoord {
  double Khat = 1.0;
  double Xhat = 0.0;
};

// Solved collective state. Sector-indexed arrays have x.n entries; the firm
// capital profile psi2_kx is x.n * k.n (row = sector) and the investor density
// psihat2 is x.n * khat.n.
struct BackgroundState {
  SectorGrid grid;
  std::vector<double> psi2_x;
  std::vector<double> psi2_kx;
  std::vector<double> psihat2;
  std::vector<double> K_X;      // average invested capital per firm
  std::vector<double> Khat_X;   // total invested capital
  std::vector<double> N_X;
  std::vector<double> Nhat_X;
  std::vector<double> khat_second_moment;
  std::vector<double> f_x, g_x, F_x, p_x, A_x;
  double M_param = 0.0;
  double C_norm = 1.0;
  double D_const = 0.0;
  double V = 0.0;
  double V0 = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
};

void validate_model_spec(const ModelSpec& spec, const SectorGrid& grid);

// Linear interpolation of a sector-indexed array at an off-node coordinate.
double sector_interp(const Axis& x, const std::vector<double>& v, double at);

// Firm capital profile psi2(K, X) at an arbitrary sector coordinate (k.n values).
std::vector<double> firm_profile_at(const BackgroundState& bg, double x);

// s-averaged attractiveness sum_i w_i F2(s_i, v).
double f2_s_avg(const ModelSpec& spec, double v);

// Denominator of the relative attractiveness at sector x for a given capital profile.
double f2_denominator(const ModelSpec& spec, const BackgroundState& bg, double x,
                      const std::vector<double>& profile);

// Global normalizer of long-term returns over the solved firm density.
double return_normalizer(const ModelSpec& spec, const BackgroundState& bg);

// Relative attractiveness F2(s, R(K,X)) / Int F2avg(R(K',X)) psi2(K',X) dK'.
double eval_F2hat(const ModelSpec& spec, const BackgroundState& bg, const FirmCoord& at);

// Excess allocation Gamma = F2hat(s, R(K,X)) Khat_X / K - 1.
double eval_Gamma(const ModelSpec& spec, const BackgroundState& bg, const FirmCoord& at);

// Capital-adjustment drift u = (K - F2hat(s, R(K,X)) Khat_X) / epsilon.
double eval_u(const ModelSpec& spec, const BackgroundState& bg, const FirmCoord& at);

// Investor short-term return density f(X).
double eval_f(const ModelSpec& spec, const BackgroundState& bg, double xhat);

// Investor sector drift g(X).
double eval_g(const ModelSpec& spec, const BackgroundState& bg, double xhat);

}  // namespace capfield
