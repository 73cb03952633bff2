#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "screening/payoff.hpp"
#include "screening/types.hpp"

namespace screening {

struct EquilibriumCandidate {
  WorkerSet c;
  WageProfile omega;   // screening offers, defined exactly on c
  double sigma = 0.0;  // firm's rejection probability; 0 for pure candidates
};

// All acceptance sets the high firm finds optimal once worker i's offer is off
// the table: argmax over X within c minus i of firm_payoff(X|c,omega), within
// kEps of the maximum. Sorted by size, then bitmask.
std::vector<WorkerSet> best_response_sets(WorkerId i, const EquilibriumCandidate& cand,
                                          const ModelParams& params,
                                          const SharingMatrix& m);

struct CheckResult {
  bool pass = true;
  double slack = 0.0;  // amount by which the binding inequality clears
};

struct WorkerCheck {
  WorkerId worker = 0;
  bool pass = true;
  double slack = 0.0;
  bool gated = false;  // deviation wage at or below s_low, so no usable deviation
};

// Reported for empty-c candidates: the belief condition and both readings of
// the observability bound under which no-screening is the predicted outcome.
// Informational only; the verdict rests on the explicit deviation checks.
struct NoScreenDiagnostics {
  bool screening_unprofitable = false;  // p*s_high <= s_low
  double pbar_ratio = 0.0;              // Pbar(S)/|S| over the screener pool
  bool scalar_rho = false;              // the two bounds below need a scalar rho
  double rhs_with_delta = 0.0;          // delta*(n-1)*rho
  double rhs_plain = 0.0;               // (n-1)*rho
  bool holds_with_delta = false;
  bool holds_plain = false;
};

struct VerificationReport {
  CheckResult firm_indifference;        // pi(C) vs pi(empty)
  CheckResult firm_optimality;          // pi(C) vs best alternative acceptance set
  CheckResult lowtype_bound;            // every offer at or above s_low
  // Alternating-offers runs only: the first-period separating wage must clear
  // the pooling wage, or screening cannot be supported at all.
  std::optional<CheckResult> separating_wage;
  std::vector<WorkerCheck> empty_in_chi;
  std::vector<WorkerCheck> screener_ic;
  std::vector<WorkerCheck> pooler_ic;   // one row per non-reluctant pooler
  std::optional<NoScreenDiagnostics> no_screen;
  bool verdict = false;
  std::string to_string() const;
};

// Full check of a pure candidate: firm indifference between accepting all of
// c and rejecting all, firm global optimality over acceptance sets, the
// low-wage floor, the empty set being a best response after any single
// removal, and both worker-side deviation comparisons. Reluctant workers must
// stay out of c and are never tempted to screen at their prior.
VerificationReport verify_equilibrium(const EquilibriumCandidate& cand,
                                      const ModelParams& params, const SharingMatrix& m,
                                      const WorkerPartition& partition);

namespace detail {

// Verification skeleton shared with the penalty-extended checks: the firm
// payoff and worker values are injected so the same pass/fail structure can
// run over either payoff family.
using PiFn = std::function<double(const WorkerSet&)>;
using ValuesFn = std::function<WorkerValues(WorkerId)>;
VerificationReport verify_with(const WorkerSet& c, const WageProfile& omega,
                               const ModelParams& params, const SharingMatrix& m,
                               const WorkerPartition& partition, const PiFn& pi,
                               const ValuesFn& values);

}  // namespace detail

// Enumerates screener-pool truncations (sizes 0..|S|) under a scalar-symmetric
// matrix, builds the uniform indifference wage for each, and returns every
// candidate that verifies, no-screening included. Sizes whose indifference
// wage is nonpositive cannot form a valid profile and are skipped.
std::vector<EquilibriumCandidate> find_symmetric_equilibria(const ModelParams& params,
                                                            const SharingMatrix& m,
                                                            const WorkerPartition& partition);

enum class ExistenceNote { AlwaysExists, ExistsUnderConditions, NoScreeningEquilibrium };

struct ThresholdResult {
  int n_value = 0;  // least screener-pool size that sustains all-screen; 0 if none
  ExistenceNote note = ExistenceNote::NoScreeningEquilibrium;
  int n_rho_probe = 0;   // threshold recomputed at a slightly higher rho
  int n_pool_probe = 0;  // threshold recomputed with one extra pool worker
  bool monotone_probes = true;
};

// Finds the smallest hypothetical screener-pool size k (economy of k plus the
// fixed reluctant pool) whose all-screen candidate verifies. Small economies
// run the full verifier; larger ones use the closed-form feasibility and
// screener-deviation conditions, which the full checks reduce to under
// uniform wages.
ThresholdResult screening_threshold(const ModelParams& params, const SharingMatrix& m,
                                    const WorkerPartition& partition);

struct MixedSolution {
  EquilibriumCandidate candidate;  // sigma = rejection probability, uniform wage
  double p_star = 0.0;
  double payoff_mixed = 0.0;                // screening worker, delayed-settlement reading
  double payoff_mixed_sigma_literal = 0.0;  // comparison variant
  double payoff_pure_same_set = 0.0;        // screening worker at the pure uniform wage
  double payoff_no_screen = 0.0;            // worker value when nobody screens
  bool improves_over_no_screen = false;
};

// Mixed candidate for a given screening set: the firm randomizes rejection
// with probability sigma and the wage bill rises to keep it willing to
// randomize. Compares the screening worker's value across the mixed, pure,
// and no-screening arrangements.
MixedSolution solve_mixed(const ModelParams& params, const SharingMatrix& m,
                          const WorkerSet& c);

}  // namespace screening
