#include "screening/observability.hpp"

#include <cmath>

namespace screening {

namespace {

// prod_{k in C} (1 - rho_{jk}); the chance j sees none of C's wages.
double miss_prob(WorkerId j, const WorkerSet& c, const SharingMatrix& m) {
  double miss = 1.0;
  for (WorkerId k : c.ids()) miss *= 1.0 - m.at(j, k);
  return miss;
}

bool any_positive_rho(WorkerId j, std::uint32_t mask, const SharingMatrix& m) {
  for (WorkerId k = 0; k < m.n(); ++k) {
    if ((mask >> k) & 1u) {
      if (m.at(j, k) > 0.0) return true;
    }
  }
  return false;
}

}  // namespace

double observe_prob(WorkerId j, const WorkerSet& c, const SharingMatrix& m) {
  if (c.contains(j)) fail(Errc::member_query, "observe_prob: j is a member of C");
  if (j < 0 || j >= m.n()) fail(Errc::index_out_of_range, "observe_prob: j outside matrix");
  for (WorkerId k : c.ids()) {
    if (k >= m.n()) fail(Errc::index_out_of_range, "observe_prob: C outside matrix");
  }
  return 1.0 - miss_prob(j, c, m);
}

double expected_observers(const WorkerSet& c, const SharingMatrix& m) {
  double total = 0.0;
  for (WorkerId j = 0; j < m.n(); ++j) {
    if (!c.contains(j)) total += observe_prob(j, c, m);
  }
  return total;
}

double expected_observers_symmetric(int n_workers, int c_size, double rho) {
  if (n_workers < 1 || c_size < 0 || c_size > n_workers) {
    fail(Errc::domain_error, "expected_observers_symmetric: bad sizes");
  }
  if (rho < 0.0 || rho > 1.0) {
    fail(Errc::domain_error, "expected_observers_symmetric: rho outside [0,1]");
  }
  if (c_size == 0) return 0.0;
  return (n_workers - c_size) * (1.0 - std::pow(1.0 - rho, c_size));
}

SubmodularityReport submodularity_report(const SharingMatrix& m, WorkerId j,
                                         const WorkerSet& universe) {
  if (universe.contains(j)) {
    fail(Errc::member_query, "submodularity_report: universe contains j");
  }
  if (universe.size() > 16) {
    fail(Errc::universe_too_large, "submodularity_report: universe exceeds 16 workers");
  }

  SubmodularityReport rep;
  const std::uint32_t full = universe.mask();

  // Enumerate all subsets of the universe as A, and all subsets as B.
  for (std::uint32_t a = 0;; a = (a - full) & full) {
    for (std::uint32_t b = 0;; b = (b - full) & full) {
      const std::uint32_t cap = a & b;
      const std::uint32_t cup = a | b;
      const double lhs = observe_prob(j, WorkerSet::from_mask(a), m) +
                         observe_prob(j, WorkerSet::from_mask(b), m);
      const double rhs = observe_prob(j, WorkerSet::from_mask(cup), m) +
                         observe_prob(j, WorkerSet::from_mask(cap), m);
      ++rep.pairs_checked;

      if (lhs < rhs - kEps) {
        ++rep.violations;
        if (rep.violation_samples.size() < 8) rep.violation_samples.push_back({a, b, lhs, rhs});
      }

      const bool strict = lhs > rhs + kEps;
      if (strict) ++rep.strict_pairs;

      const bool cap_survives = miss_prob(j, WorkerSet::from_mask(cap), m) > 0.0;
      const bool a_only = any_positive_rho(j, a & ~b, m);
      const bool b_only = any_positive_rho(j, b & ~a, m);
      const bool predicted_strict = cap_survives && a_only && b_only;
      if (strict != predicted_strict) {
        ++rep.condition_mismatches;
        if (rep.mismatch_samples.size() < 8) rep.mismatch_samples.push_back({a, b, lhs, rhs});
      }

      if (b == full) break;
    }
    if (a == full) break;
  }
  return rep;
}

PbarRatioSeries pbar_ratio_series(double rho, int n_workers) {
  PbarRatioSeries series;
  for (int k = 1; k <= n_workers; ++k) {
    series.ratios.emplace_back(k, expected_observers_symmetric(n_workers, k, rho) / k);
  }
  series.strictly_decreasing = true;
  for (std::size_t i = 1; i < series.ratios.size(); ++i) {
    if (series.ratios[i].second >= series.ratios[i - 1].second - kEps) {
      series.strictly_decreasing = false;
      break;
    }
  }
  return series;
}

}  // namespace screening
