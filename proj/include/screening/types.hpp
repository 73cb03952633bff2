#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace screening {

// Absolute tolerance used wherever model equalities/inequalities are tested.
inline constexpr double kEps = 1e-9;

enum class Errc {
  member_query,
  index_out_of_range,
  universe_too_large,
  domain_error,
  profile_mismatch,
  subset_violation,
  belief_too_low,
  empty_set,
  asymmetric_matrix,
  partition_violation,
  not_rejected,
  offer_out_of_range,
  config_invalid,
  no_comparators,
  bracket_failure,
  beliefs_not_intermediate,
  parse_error,
  validation_error,
};

const char* errc_name(Errc code);

class ModelError : public std::runtime_error {
 public:
  ModelError(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw ModelError(code, what);
}

using WorkerId = int;

// A set of worker ids held as a bitmask. Ids are dense and 0-based; anything
// that enumerates subsets guards its own universe size separately.
class WorkerSet {
 public:
  static constexpr int kMaxWorkers = 31;

  WorkerSet() = default;
  WorkerSet(std::initializer_list<int> ids) {
    for (int id : ids) *this = with(id);
  }
  static WorkerSet from_mask(std::uint32_t mask) {
    WorkerSet s;
    s.bits_ = mask;
    return s;
  }
  static WorkerSet all(int n);

  bool contains(WorkerId id) const { return id >= 0 && id < kMaxWorkers && (bits_ >> id) & 1u; }
  WorkerSet with(WorkerId id) const;
  WorkerSet without(WorkerId id) const;
  int size() const { return __builtin_popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  std::uint32_t mask() const { return bits_; }

  bool subset_of(const WorkerSet& other) const { return (bits_ & ~other.bits_) == 0; }
  friend WorkerSet operator|(WorkerSet a, WorkerSet b) { return from_mask(a.bits_ | b.bits_); }
  friend WorkerSet operator&(WorkerSet a, WorkerSet b) { return from_mask(a.bits_ & b.bits_); }
  friend WorkerSet operator-(WorkerSet a, WorkerSet b) { return from_mask(a.bits_ & ~b.bits_); }
  friend bool operator==(WorkerSet a, WorkerSet b) { return a.bits_ == b.bits_; }
  friend bool operator!=(WorkerSet a, WorkerSet b) { return a.bits_ != b.bits_; }

  std::vector<WorkerId> ids() const;
  std::string to_string() const;  // "{0,1,3}"

 private:
  std::uint32_t bits_ = 0;
};

// Visits every submask of `mask`, including 0 and `mask` itself.
template <class F>
void for_each_subset(std::uint32_t mask, F&& fn) {
  std::uint32_t sub = mask;
  while (true) {
    fn(sub);
    if (sub == 0) break;
    sub = (sub - 1) & mask;
  }
}

enum class Variant { Simple, AlternatingOffers };

struct ModelParams {
  double s_low = 1.0;   // low-type surplus, also the wage floor
  double s_high = 2.0;  // high-type surplus
  double p = 0.5;       // prior probability of the high type
  double beta = 1.0;    // discount factor between periods (firm side)
  double delta = 0.5;   // discount factor between rounds within a period
  double d = 0.5;       // worker's cost of ending a period without agreement
  int n_workers = 1;
  Variant variant = Variant::Simple;

  // Throws validation_error; library functions assume validated inputs and do
  // not re-check, so boundary values can still be probed directly in tests.
  void validate() const;
};

// Pairwise wage-observation probabilities rho_{ij} = Pr(i sees j's period-1
// wage). Diagonal is identically zero.
class SharingMatrix {
 public:
  explicit SharingMatrix(int n);
  static SharingMatrix symmetric(int n, double rho);
  static SharingMatrix from_rows(const std::vector<std::vector<double>>& rows);

  int n() const { return n_; }
  double at(WorkerId i, WorkerId j) const;
  void set(WorkerId i, WorkerId j, double rho);
  // True when every off-diagonal entry equals a single scalar (within kEps).
  bool symmetric_scalar(double* rho_out = nullptr) const;
  void validate() const;

 private:
  int n_ = 0;
  std::vector<double> rho_;
};

// Splits the workforce by second-period screening appetite. Members of
// `screeners` screen at the prior belief; `reluctant` members screen only
// above the cutoff q_reluctant > p and never deviate to first-period
// screening.
struct WorkerPartition {
  WorkerSet screeners;
  WorkerSet reluctant;
  double q_reluctant = 1.0;

  static WorkerPartition all_screeners(int n);
  void validate(const ModelParams& params) const;
};

// First-period wage offers, keyed by worker and restricted to a screening set.
struct WageProfile {
  std::map<WorkerId, double> offers;

  static WageProfile uniform(const WorkerSet& c, double wage);
  double at(WorkerId id) const;  // profile_mismatch when absent
  bool domain_is(const WorkerSet& c) const;
  double sum() const;
  // Offers must be positive and finite. The wage floor s_low is a reported
  // equilibrium check, not an input precondition.
  void validate(const WorkerSet& c) const;
};

}  // namespace screening
