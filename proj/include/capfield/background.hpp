#pragma once
#include <vector>

#include "capfield/model.hpp"

namespace capfield {

struct FirmDensityResult {
  std::vector<double> psi2_x;
  double V = 0.0;   // total sector volume
  double V0 = 0.0;  // volume where the density clipped to 0
};

struct InvestorDensityResult {
  std::vector<double> psihat2;  // x.n * khat.n, row = sector
  double C_mean = 1.0;          // mean per-sector normalization factor
};

// Integral over the sector axis; a single-node axis uses a unit counting
// measure so one-sector models stay well defined.
double sector_integral(const Axis& x, const std::vector<double>& v);

// Firm sector density psi2(X) from the mean-capital field and the crowding
// constant D, clipped at 0. V0 is the clipped volume.
FirmDensityResult firm_density(const ModelSpec& spec, const SectorGrid& grid,
                               const std::vector<double>& K_X, double D);

// Background scalar f(X): per-sector investment return evaluated at the
// sector-average capital. Rnorm is the sector integral of R(K_X, X) psi2(X).
std::vector<double> background_f(const ModelSpec& spec, const SectorGrid& grid,
                                 const std::vector<double>& K_X,
                                 const std::vector<double>& psi2_x);

// Background drift g(X): sector gradient of F0(R) + nu F1(R / Rnorm) along
// the curve (K_X(X), X).
std::vector<double> background_g(const ModelSpec& spec, const SectorGrid& grid,
                                 const std::vector<double>& K_X,
                                 const std::vector<double>& psi2_x);

// Capital-argument sensitivity F(X) of the investor action. Zero when
// spec.neglect_kxhat_derivatives is set; otherwise centered finite
// differences in K_X with the stated density ratios.
std::vector<double> background_F(const ModelSpec& spec, const SectorGrid& grid,
                                 const std::vector<double>& K_X,
                                 const std::vector<double>& psi2_x,
                                 const std::vector<double>& khat2_prev);

// Investor density rows from the background scalars stored in bg (f_x, p_x,
// F_x, Nhat_X), normalized per sector to Nhat_X. psi2_x gates the ZeroF check.
InvestorDensityResult investor_density(const ModelSpec& spec, const SectorGrid& grid,
                                       const BackgroundState& bg);

// Crowding constant D from the solved densities.
double compute_D_const(const ModelSpec& spec, const BackgroundState& bg);

// Damped fixed-point solve of K_X psi2(X) = Int Khat psihat2 dKhat with all
// derived fields rebuilt each sweep. init_KX must be positive everywhere.
BackgroundState solve_selfconsistent(const ModelSpec& spec, const SectorGrid& grid,
                                     const std::vector<double>& init_KX);

}  // namespace capfield
