#pragma once

#include <vector>

#include "capfield/model.hpp"

namespace capfield {

// One-agent transition query. alpha drives the lifespan-averaged density,
// t the fixed-time kernel; the unused field is ignored by the other domain.
// Path integrals run over path_subdiv uniform subdivisions (64 minimum).
struct FirmQuery {
  FirmCoord initial;
  FirmCoord final;
  double alpha = 1.0;
  double t = 0.0;
  int path_subdiv = 64;
};

struct InvestorQuery {
  InvestorCoord initial;
  InvestorCoord final;
  double alpha = 1.0;
  double t = 0.0;
  int path_subdiv = 64;
};

// log_value reconstructs as drift_D - alpha_eff * distance_term under the
// default exponential kernel form. The laplace kernel form stores the decay
// rate in alpha_eff and log_value = drift_D + log of the exact transform of
// the time-domain kernel at that rate.
struct TransitionResult {
  double log_value = 0.0;
  double drift_D = 0.0;
  double drift_parts[3] = {0.0, 0.0, 0.0};
  double alpha_eff = 0.0;
  double distance_term = 0.0;
};

struct FirmDrift {
  double d1 = 0.0;  // relocation along the sector return gradient
  double d2 = 0.0;  // capital adjustment toward the allocated level
  double d3 = 0.0;  // attractiveness change across the crossed sectors
};

// Shifted capital K - F2hat(s, R(K_X, X)) Khat_X entering the displacement
// metric; plain K when the capital channel is off.
double shifted_capital_firm(const ModelSpec& spec, const BackgroundState& bg, double s, double K,
                            double X);

// Shifted capital Khat + sigma_khat2 F(X) / f(X)^2; throws ZeroF when the
// short-term return density vanishes at X.
double shifted_capital_investor(const ModelSpec& spec, const BackgroundState& bg, double khat,
                                double xhat);

FirmDrift drift_firm(const ModelSpec& spec, const BackgroundState& bg, const FirmQuery& q);
double alpha_eff_firm(const ModelSpec& spec, const BackgroundState& bg, const FirmQuery& q);

// Lifespan-averaged transition density for a firm.
TransitionResult firm_transition(const ModelSpec& spec, const BackgroundState& bg,
                                 const FirmQuery& q);

// Fixed-time transition kernel for a firm (q.t > 0).
double firm_kernel_t(const ModelSpec& spec, const BackgroundState& bg, const FirmQuery& q);

// Investor drift pieces: path integral of g over sigma_xhat2, final and
// initial capital-gain terms Khat^2 f(X) / sigma_khat2.
struct InvestorDrift {
  double path_g = 0.0;
  double gain_f = 0.0;
  double gain_i = 0.0;
};

InvestorDrift drift_investor_parts(const ModelSpec& spec, const BackgroundState& bg,
                                   const InvestorQuery& q);
double drift_investor(const ModelSpec& spec, const BackgroundState& bg, const InvestorQuery& q);

// Path average of the relative long-term sector return entering the investor
// mobility; throws ZeroF when f vanishes or changes sign on the path.
double relative_return_avg(const ModelSpec& spec, const BackgroundState& bg,
                           const InvestorQuery& q);
double alpha_eff_investor(const ModelSpec& spec, const BackgroundState& bg,
                          const InvestorQuery& q);

// Lifespan-averaged transition density for an investor.
TransitionResult investor_transition(const ModelSpec& spec, const BackgroundState& bg,
                                     const InvestorQuery& q);

// Fixed-time transition kernel for an investor (q.t > 0).
double investor_kernel_t(const ModelSpec& spec, const BackgroundState& bg,
                         const InvestorQuery& q);

// Batch evaluation over independent queries; parallel runs the OpenMP kernel,
// serial is the reference implementation with identical results.
std::vector<TransitionResult> firm_transition_batch(const ModelSpec& spec,
                                                    const BackgroundState& bg,
                                                    const std::vector<FirmQuery>& qs,
                                                    bool parallel = true);
std::vector<TransitionResult> investor_transition_batch(const ModelSpec& spec,
                                                        const BackgroundState& bg,
                                                        const std::vector<InvestorQuery>& qs,
                                                        bool parallel = true);

}  // namespace capfield
