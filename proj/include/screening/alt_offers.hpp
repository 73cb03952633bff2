#pragma once

#include "screening/solver.hpp"
#include "screening/types.hpp"

namespace screening {

// Closed-form wages for the variant where each period's negotiation is an
// infinite-horizon alternating-offers game with within-period discount delta.
// Workers do not discount between periods in this variant; the firm still
// discounts at beta.
struct RubinsteinWages {
  double w_low = 0.0;   // complete-information wage at surplus s_low
  double w_high = 0.0;  // complete-information wage at surplus s_high
  double w_h = 0.0;     // second-period separating wage the high firm accepts
  double w_h1 = 0.0;    // first-period separating wage net of the reputation discount
};

// w(s) = s(1-delta)/(1-delta^2), the unique subgame-perfect wage when the
// worker proposes first and the surplus is known to be s.
double rubinstein_wage(double s, const ModelParams& params);

RubinsteinWages rubinstein_wages(const ModelParams& params);

// Second-period screening package at belief p_hat: the separating wage w_h,
// the screening value V_S(p_hat) = p_hat w_h + (1-p_hat) delta^2 w(s_low), and
// whether screening beats pooling at w(s_low).
struct AltScreenValues {
  double w_h = 0.0;
  double v_s = 0.0;
  bool screens = false;
};

AltScreenValues p2_screen_values(double p_hat, const ModelParams& params);

// w_h1 = w_h - beta (w(s_high) - w(s_low)): what the high firm will pay in the
// first period to be revealed rather than delay one round and pass as low.
double p1_separating_wage(const ModelParams& params);

// High-firm payoff over acceptance set a within screening set c, in
// Rubinstein units. The uninformed second-period surplus uses the separating
// branch only when the prior screens in period 2.
double firm_payoff_alt(const WorkerSet& a, const WorkerSet& c, const WageProfile& w,
                       const ModelParams& params, const SharingMatrix& m);

// Wage sum making the high firm indifferent between accepting and rejecting
// every offer in c: |c| w_h - beta (w(s_high) - w(s_low)) (Pbar(c) + |c|).
double wbar_alt(const WorkerSet& c, const ModelParams& params, const SharingMatrix& m);

// Low firm's take-the-money-and-run constraint for acceptance set a: the
// period-2 agreements lost must outweigh the period-1 wage savings.
bool lowtype_constraint(const WorkerSet& a, const WageProfile& w, const ModelParams& params,
                        const SharingMatrix& m);

// Whether the low firm rejects a pooler j's deviation offer, so that the
// deviation actually screens. Also evaluates the parameter-only sufficient
// condition beta >= rhs.
struct PoolDeviateCheck {
  bool feasible = false;
  double lhs = 0.0;
  double rhs = 0.0;
  bool sufficient = false;
};

PoolDeviateCheck pool_deviate_feasible(const WorkerSet& c, WorkerId j, const ModelParams& params,
                                       const SharingMatrix& m);

// Prior range in which workers screen in period 1 but not in period 2. The
// interval can be empty at extreme parameters; that is reported, not thrown.
struct BeliefInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool empty = false;
  bool contains_p = false;
};

BeliefInterval intermediate_beliefs_range(const ModelParams& params);

// Worker-side values in Rubinstein units. For a member of c the deviation
// fields describe dropping to the pooling wage; for an outsider they describe
// screening at the offer wbar_alt(c+i) - wbar_alt(c), recorded in
// deviation_offer (members record their own offer there).
struct AltWorkerValues {
  double screen_value = 0.0;
  double pool_value = 0.0;
  double screen_to_pool_deviation = 0.0;
  double pool_to_screen_deviation = 0.0;
  double deviation_offer = 0.0;
};

AltWorkerValues worker_values_alt(WorkerId i, const WorkerSet& c, const WageProfile& w,
                                  const ModelParams& params, const SharingMatrix& m);

// Full candidate check for the alternating-offers variant: firm indifference
// and optimality over acceptance sets, the separating-wage floor, the low
// firm's constraint at A=C, screener deviations to w(s_low), and pooler
// deviations gated by pool_deviate_feasible.
VerificationReport verify_equilibrium_alt(const EquilibriumCandidate& cand,
                                          const ModelParams& params, const SharingMatrix& m);

// Every size-k truncation priced at wbar_alt(c)/k that verifies, including
// the empty set.
std::vector<EquilibriumCandidate> find_symmetric_equilibria_alt(const ModelParams& params,
                                                                const SharingMatrix& m);

}  // namespace screening
