#pragma once

#include <cstdint>
#include <vector>

#include "screening/types.hpp"

namespace screening {

// ---------------------------------------------------------------------------
// Second period (simple variant)
// ---------------------------------------------------------------------------

// Highest wage the high-productivity firm accepts from an uninformed worker:
// delta*s_low + (1-delta)*s_high.
double p2_screening_wage(const ModelParams& params);

struct SecondPeriodDecision {
  bool screens = false;
  double worker_value = 0.0;
  double firm_value_high = 0.0;  // high firm's surplus against this worker
  double firm_value_low = 0.0;   // always 0: the low firm has no surplus to share
};

// Second-period play of a worker holding belief q that the firm is the high
// type. Ties (q*s_high == s_low) resolve to screening.
SecondPeriodDecision p2_decision(double q, const ModelParams& params);

struct P2Receipts {
  double v_high = 0.0;  // wage received if the firm turns out high
  double v_low = 0.0;   // wage received if the firm turns out low
};

// Type-conditional second-period receipts of a worker at belief q. Averaging
// with weights (q, 1-q) recovers p2_decision(q).worker_value.
P2Receipts p2_worker_receipts(double q, const ModelParams& params);

// ---------------------------------------------------------------------------
// First-period firm payoff and derived wage quantities
// ---------------------------------------------------------------------------

// High firm's payoff when the screening set is c, it accepts exactly the
// offers in a (a subset of c), and screening wages are w. Workers outside c
// pool at s_low. The optional partition marks reluctant workers, who do not
// screen in period 2 at their prior; omitted, every uninformed worker follows
// p2_decision at belief p.
double firm_payoff(const WorkerSet& a, const WorkerSet& c, const WageProfile& w,
                   const ModelParams& params, const SharingMatrix& m,
                   const WorkerPartition* partition = nullptr);

struct SupermodularPayoffPair {
  std::uint32_t a = 0, b = 0;
  double lhs = 0.0, rhs = 0.0;  // lhs = pi(A|B)+pi(A&B), rhs = pi(A)+pi(B)
};

struct SupermodularityReport {
  long pairs_checked = 0;
  long strict_pairs = 0;
  long violations = 0;
  long nonnested_pairs = 0;
  long nonnested_equalities = 0;
  bool all_rho_interior = false;  // every off-diagonal entry in (0,1)
  std::vector<SupermodularPayoffPair> violation_samples;  // capped at 8
  bool ok() const {
    return violations == 0 && (!all_rho_interior || nonnested_equalities == 0);
  }
};

// Checks pi(A|B) + pi(A&B) >= pi(A) + pi(B) over all pairs A,B within c, with
// payoffs memoized per subset. Non-nested pairs must be strictly above when
// all sharing probabilities are interior.
SupermodularityReport supermodularity_report(const WorkerSet& c, const WageProfile& w,
                                             const ModelParams& params,
                                             const SharingMatrix& m);

// Total screening wage bill at which the high firm is indifferent between
// accepting all of c and rejecting all of c.
double wbar(const WorkerSet& c, const ModelParams& params, const SharingMatrix& m);

// True when the per-worker share of wbar clears the low firm's reservation
// wage s_low, i.e. (1-delta-beta) >= beta*Pbar(C)/|C|.
bool feasible_screening(const WorkerSet& c, const ModelParams& params,
                        const SharingMatrix& m);

// Highest screening offer by outsider i that the high firm accepts while
// still accepting all of c, in the closed form carried through the incentive
// analysis. See deviation_wage_indifference for the payoff-level cross-check.
double wtilde(const WorkerSet& c, WorkerId i, const ModelParams& params,
              const SharingMatrix& m);

// Deviator wage at which firm_payoff is exactly indifferent between accepting
// and rejecting i's lone extra offer on top of c. Computed from firm_payoff
// directly, independent of the wtilde closed form.
double deviation_wage_indifference(const WorkerSet& c, WorkerId i,
                                   const ModelParams& params, const SharingMatrix& m);

// ---------------------------------------------------------------------------
// Mixed firm response
// ---------------------------------------------------------------------------

struct MixedQuantities {
  double p_star = 0.0;   // s_low / s_high
  double sigma = 0.0;    // high firm's rejection probability
  double wage_sum = 0.0; // wage bill sustaining indifference under rejection risk
};

// Requires p > p_star; at or below, screening cannot be sustained by firm
// randomization and BeliefTooLow is raised.
MixedQuantities mixed_quantities(const WorkerSet& c, const ModelParams& params,
                                 const SharingMatrix& m);

// Screening worker's value under the randomizing firm, at the uniform wage
// wage_sum/|C|. The rejection branch pays the delayed settlement delta*s_low;
// sigma_literal swaps in sigma*s_low for comparison runs.
double mixed_screener_payoff(const WorkerSet& c, const ModelParams& params,
                             const SharingMatrix& m, bool sigma_literal = false);

struct MixedFirmValues {
  double accept_all = 0.0;    // high firm value on the acceptance branch
  double reject_all = 0.0;    // high firm value on the rejection branch
  double expected_high = 0.0; // sigma-weighted average of the two
};

// High firm's branch values under the mixed candidate (uniform wage
// wage_sum/|C|, rejection probability sigma). Rejected screeners re-screen in
// period 2 at the posterior p_star, which is what separates the rejection
// branch from its pure-deviation counterpart.
MixedFirmValues mixed_firm_values(const WorkerSet& c, const ModelParams& params,
                                  const SharingMatrix& m,
                                  const WorkerPartition* partition = nullptr);

// Pooling outsider j's value when the firm rejects screening offers with
// probability sigma. Observing a settled screener moves j to the rejection
// posterior; observing an accepted screening wage reveals the high type.
double mixed_pooler_payoff(WorkerId j, const WorkerSet& c, double sigma,
                           const ModelParams& params, const SharingMatrix& m,
                           const WorkerPartition* partition = nullptr);

// ---------------------------------------------------------------------------
// Worker values
// ---------------------------------------------------------------------------

struct WorkerValues {
  double screen_value = 0.0;
  double pool_value = 0.0;
  double screen_to_pool_deviation = 0.0;
  double pool_to_screen_deviation = 0.0;
  double wtilde_used = 0.0;  // deviation wage underlying pool_to_screen_deviation
};

// Two-period values of worker i against the candidate (c, w). Members of c
// read screen_value off their own wage; outsiders read pool_value against c.
// The opposite-side entries use the relevant hypothetical wage (wtilde) and
// ambient set (c minus i for members), so deviation comparisons are uniform.
WorkerValues worker_values(WorkerId i, const WorkerSet& c, const WageProfile& w,
                           const ModelParams& params, const SharingMatrix& m,
                           const WorkerPartition* partition = nullptr);

}  // namespace screening
