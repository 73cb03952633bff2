#pragma once

#include <functional>
#include <vector>

#include "screening/solver.hpp"
#include "screening/types.hpp"

namespace screening {

// How the penalty environment distorts play. Perception puts a proposal cost
// on protected workers, TasteBased puts an employment cost on the firm, and
// Statistical discounts what the high firm believes protected workers produce.
enum class DiscMode { Perception, TasteBased, Statistical };

struct DiscriminationConfig {
  WorkerSet protected_set;           // workers covered by the penalty rule
  double ell = 0.0;                  // damages paid per successful claim
  double alpha = 0.0;                // share of damages reaching the worker
  double c = 0.0;                    // mode-specific friction cost
  DiscMode mode = DiscMode::Perception;
  bool narrow_comparator = false;    // comparator must earn at least the rejected offer

  void validate(const ModelParams& params) const;
};

// Probability that protected worker i, rejected at a first-period offer in
// (s_low, s_high], later sees an accepted unprotected comparator earning
// above s_low (or at least i's own offer when narrow_comparator is set).
double lawsuit_prob(WorkerId i, const WorkerSet& a, const WorkerSet& c, const WageProfile& w,
                    const SharingMatrix& m, const ModelParams& params,
                    const DiscriminationConfig& cfg);

// High-firm payoff with the penalty environment applied: expected damages for
// every rejected protected screener with an offer in claim range, plus the
// mode's own cost channel.
double firm_payoff_disc(const WorkerSet& a, const WorkerSet& c, const WageProfile& w,
                        const ModelParams& params, const SharingMatrix& m,
                        const DiscriminationConfig& cfg,
                        const WorkerPartition* partition = nullptr);

// Worker-side values under the penalty environment. Perception charges
// protected workers c per period in which they propose above s_low; the other
// modes leave worker values unchanged.
WorkerValues worker_values_disc(WorkerId i, const WorkerSet& c, const WageProfile& w,
                                const ModelParams& params, const SharingMatrix& m,
                                const DiscriminationConfig& cfg,
                                const WorkerPartition* partition = nullptr);

// Comparison of the two ways a protected outsider can monetize the penalty:
// bait the firm into a rejection and sue, or fold the expected damages into an
// acceptable first-period offer.
struct EntrapmentReport {
  double entrapment_value = 0.0;       // propose unacceptably, settle late, sue on detection
  double acceptable_offer_value = 0.0; // propose the damages-backed acceptable wage
  double entrap_offer = 0.0;           // representative unacceptable offer used
  double acceptable_offer = 0.0;       // deviation wage plus expected damages
  bool dominated = false;              // acceptable branch weakly dominates
};

EntrapmentReport entrapment_value(WorkerId i, const WorkerSet& c, const WageProfile& w,
                                  const ModelParams& params, const SharingMatrix& m,
                                  const DiscriminationConfig& cfg,
                                  const WorkerPartition* partition = nullptr);

// Firm-indifferent wage sum under the penalty environment, solved by bisecting
// the accept-all versus reject-all gap over [0, |C| * s_high]. The flags record
// whether adding one more screener raises the per-worker wage, split by
// protected status of the entrant.
struct WbarDiscResult {
  double wage_sum = 0.0;
  bool increasing_unprotected = true;
  bool increasing_protected = true;
};

WbarDiscResult wbar_disc(const WorkerSet& c, const ModelParams& params, const SharingMatrix& m,
                         const DiscriminationConfig& cfg);

// verify_equilibrium with the penalty-environment payoffs on both sides.
VerificationReport verify_equilibrium_disc(const EquilibriumCandidate& cand,
                                           const ModelParams& params, const SharingMatrix& m,
                                           const WorkerPartition& partition,
                                           const DiscriminationConfig& cfg);

// find_symmetric_equilibria with the penalty-environment payoffs. Statistical
// mode prices the wage from wbar_disc; the other modes keep the base wage.
std::vector<EquilibriumCandidate> find_symmetric_equilibria_disc(
    const ModelParams& params, const SharingMatrix& m, const WorkerPartition& partition,
    const DiscriminationConfig& cfg);

// Equilibrium outcomes (size and per-worker wage) recomputed across a grid of
// damage levels, plus whether entrapment stays dominated throughout.
struct EquilibriumOutcome {
  int size = 0;
  double wage = 0.0;
};

struct PenaltyIrrelevanceReport {
  std::vector<double> ell_grid;
  std::vector<std::vector<EquilibriumOutcome>> outcomes;  // one list per grid point
  bool identical = false;                                 // outcome lists match across the grid
  bool entrapment_dominated = true;                       // over all found equilibria and ells
};

PenaltyIrrelevanceReport penalty_irrelevance_check(const ModelParams& params,
                                                   const SharingMatrix& m,
                                                   const WorkerPartition& partition,
                                                   const DiscriminationConfig& cfg,
                                                   const std::vector<double>& ell_grid);

// Low firm's accept-or-reject policy toward protected workers' s_low offers:
// rejection risks damages at the detection probability, acceptance costs the
// taste friction (nothing under Statistical). Ties reject.
using DetectionHook =
    std::function<double(WorkerId, const ModelParams&, const SharingMatrix&,
                         const DiscriminationConfig&)>;

struct LowTypePolicyReport {
  bool accept_protected = false;
  double accept_cost = 0.0;      // total friction cost of accepting all protected offers
  double reject_cost = 0.0;      // total expected damages from rejecting them all
  double detection_prob = 0.0;   // mean detection probability across protected workers
  double ell_threshold = 0.0;    // damages level at which the policy flips
  double rho_threshold = 0.0;    // scalar rho at which the policy flips, NaN if unreachable
};

LowTypePolicyReport lowtype_policy(const ModelParams& params, const SharingMatrix& m,
                                   const DiscriminationConfig& cfg,
                                   const DetectionHook& detection = {});

}  // namespace screening
