#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "screening/discrimination.hpp"
#include "screening/solver.hpp"
#include "screening/types.hpp"

namespace screening {

// Counter-based randomness: every draw is a pure function of
// (seed, trial, site, lane), so trials are independent streams that can be
// generated in any order or in parallel with identical results.
inline constexpr std::uint64_t kSiteFirmType = 0;
inline constexpr std::uint64_t kSiteRejectCoin = 1;
inline constexpr std::uint64_t kSiteObsEdge = 2;

std::uint64_t mix64(std::uint64_t z);
double uniform_draw(std::uint64_t seed, std::uint64_t trial, std::uint64_t site,
                    std::uint64_t lane);

// Injected off-path behavior. firm_rejects forces the high firm to reject
// those workers' period-1 offers; worker_offer replaces one worker's offer.
// A member offering at most s_low is accepted while every other screening
// offer is rejected; an outsider's offer is accepted by the high firm only up
// to the deviation wage, and rejecting it takes the whole screening set down.
struct ForcedDeviation {
  WorkerSet firm_rejects;
  std::optional<std::pair<WorkerId, double>> worker_offer;

  bool active() const { return !firm_rejects.empty() || worker_offer.has_value(); }
};

struct SimConfig {
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  EquilibriumCandidate profile;
  std::optional<DiscriminationConfig> discrimination;
  ForcedDeviation forced;
  bool profile_verified = true;  // false routes a warning into the report
};

struct EpisodeRecord {
  std::uint64_t trial = 0;
  bool firm_high = false;
  std::uint32_t accepted_mask = 0;   // workers whose period-1 offer was accepted
  std::vector<std::pair<WorkerId, WorkerId>> edges;  // observer, observed
  std::vector<double> wage1, wage2;  // settled wage levels per worker
  std::vector<int> round1, round2;   // settlement round within each period
  std::uint32_t lawsuit_mask = 0;    // plaintiffs with a realized observed comparator
  std::vector<double> worker_value;  // realized discounted worker payoffs
  double firm_value = 0.0;           // realized discounted firm payoff
  // Offers the low type takes but the high type turns down; stays 0 unless a
  // forced response breaks the acceptance ordering.
  std::uint32_t crossing_violations = 0;
};

struct AgentRow {
  std::string label;
  std::uint64_t count = 0;  // trials contributing to this row
  double mean = 0.0;
  double se = 0.0;
  double analytic = 0.0;  // NaN when no analytic counterpart applies
  double z = 0.0;
};

struct SimReport {
  std::vector<AgentRow> rows;  // one per worker, then firm_high, firm_low
  std::uint64_t trials = 0;
  std::vector<std::uint64_t> lawsuits_by_worker;
  std::uint64_t lawsuit_count = 0;
  std::uint64_t single_crossing_violations = 0;
  std::string warning;  // set when the profile was flagged unverified

  std::string to_csv() const;
  std::string to_string() const;
};

// One fully resolved episode, deterministic in (config.seed, trial).
EpisodeRecord simulate_episode(const SimConfig& cfg, const ModelParams& params,
                               const SharingMatrix& m, const WorkerPartition& partition,
                               std::uint64_t trial);

// Runs config.trials episodes and aggregates per-agent means against the
// analytic values from the payoff layer. Firm rows condition on the realized
// type; worker rows average over all trials. When episodes is non-null every
// EpisodeRecord is streamed there as CSV.
SimReport estimate(const SimConfig& cfg, const ModelParams& params, const SharingMatrix& m,
                   const WorkerPartition& partition, std::ostream* episodes = nullptr);

std::string episode_csv_header(int n_workers);
std::string episode_csv_row(const EpisodeRecord& e);

}  // namespace screening
