#pragma once

#include <utility>
#include <vector>

#include "screening/types.hpp"

namespace screening {

// P^j(C): probability that outsider j observes at least one period-1 wage
// paid to a member of C. Equals 1 - prod_{k in C} (1 - rho_{jk}).
double observe_prob(WorkerId j, const WorkerSet& c, const SharingMatrix& m);

// Pbar(C) = sum over j outside C of P^j(C): the expected number of outsiders
// who see some wage inside C.
double expected_observers(const WorkerSet& c, const SharingMatrix& m);

// Closed form of Pbar under a symmetric scalar rho:
// (n - k) * (1 - (1-rho)^k) for |C| = k.
double expected_observers_symmetric(int n_workers, int c_size, double rho);

struct SubmodularPair {
  std::uint32_t a = 0, b = 0;
  double lhs = 0.0, rhs = 0.0;
};

struct SubmodularityReport {
  long pairs_checked = 0;
  long strict_pairs = 0;
  long violations = 0;
  long condition_mismatches = 0;
  std::vector<SubmodularPair> violation_samples;  // capped at 8
  std::vector<SubmodularPair> mismatch_samples;   // capped at 8
  bool ok() const { return violations == 0 && condition_mismatches == 0; }
};

// Exhaustively checks P^j(A) + P^j(B) >= P^j(A|B) + P^j(A&B) over all pairs
// of subsets of universe\{j}, and cross-checks strictness against the exact
// conditions: prod_{k in A&B}(1 - rho_{jk}) > 0, some positive rho in A\B,
// and some positive rho in B\A.
SubmodularityReport submodularity_report(const SharingMatrix& m, WorkerId j,
                                         const WorkerSet& universe);

struct PbarRatioSeries {
  std::vector<std::pair<int, double>> ratios;  // (|C|, Pbar(C)/|C|)
  bool strictly_decreasing = false;
};

// Pbar(C)/|C| for |C| = 1..n under symmetric rho; the per-screener
// observation externality shrinks as the screening set grows.
PbarRatioSeries pbar_ratio_series(double rho, int n_workers);

}  // namespace screening
