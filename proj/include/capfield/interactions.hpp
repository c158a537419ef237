#pragma once
#include "capfield/model.hpp"
#include "capfield/transition.hpp"

namespace capfield {

// Two-agent queries. The single interaction vertex sits at the path crossing;
// by default each agent contributes its own path midpoint as the crossing
// coordinate, an explicit override replaces both.
struct FirmPairQuery {
  FirmQuery a;
  FirmQuery b;
  bool explicit_crossing = false;
  FirmCoord crossing_a;
  FirmCoord crossing_b;
};

struct MixedPairQuery {
  FirmQuery a;      // the firm agent
  InvestorQuery b;  // the investor agent
  bool explicit_crossing = false;
  FirmCoord crossing_a;
  InvestorCoord crossing_b;
};

struct InvestorPairQuery {
  InvestorQuery a;
  InvestorQuery b;
};

// Interaction vertex evaluated at the crossing; value = parts[0]+parts[1]+parts[2].
// firm pair:  parts = {repulsion_a, repulsion_b, allocation_coupling}
// mixed pair: parts = {allocation_gradient, investment_gain, preference_shift}
struct PairVertex {
  double value = 0.0;
  double parts[3] = {0.0, 0.0, 0.0};
};

// Firm-firm contact vertex: direct crowding repulsion per agent plus the
// gradient of the mutual-attractiveness coupling through allocated capital.
PairVertex firm_pair_vertex(const ModelSpec& spec, const BackgroundState& bg,
                            const FirmPairQuery& pq);

// Firm-investor vertex: gradient of the firm's attractiveness share, the
// firm's deviation in investor-weighted short-term gain, and the sector
// gradient of its long-term preference deviation.
PairVertex mixed_pair_vertex(const ModelSpec& spec, const BackgroundState& bg,
                             const MixedPairQuery& pq);

// Deviation of a single firm's investor-weighted gain from the sector mean,
// including the decreasing-returns penalty (enters the mixed vertex).
double firm_return_gain(const ModelSpec& spec, const BackgroundState& bg, double K, double xhat,
                        double s);

// Deviation of a single firm's long-term preference gradient from the sector
// mean, normalized by the local firm count.
double firm_preference_shift(const ModelSpec& spec, const BackgroundState& bg, double K,
                             double xhat);

// Joint two-agent transition values. Firm pairs carry the repulsive
// correction, mixed pairs the signed investment coupling, investor pairs
// factorize exactly.
double firm_pair_transition(const ModelSpec& spec, const BackgroundState& bg,
                            const FirmPairQuery& pq);
double mixed_pair_transition(const ModelSpec& spec, const BackgroundState& bg,
                             const MixedPairQuery& pq);
double investor_pair_transition(const ModelSpec& spec, const BackgroundState& bg,
                                const InvestorPairQuery& pq);

}  // namespace capfield
