#include "screening/types.hpp"

#include <cmath>
#include <sstream>

namespace screening {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::member_query: return "MemberQuery";
    case Errc::index_out_of_range: return "IndexOutOfRange";
    case Errc::universe_too_large: return "UniverseTooLarge";
    case Errc::domain_error: return "DomainError";
    case Errc::profile_mismatch: return "ProfileMismatch";
    case Errc::subset_violation: return "SubsetViolation";
    case Errc::belief_too_low: return "BeliefTooLow";
    case Errc::empty_set: return "EmptySet";
    case Errc::asymmetric_matrix: return "AsymmetricMatrix";
    case Errc::partition_violation: return "PartitionViolation";
    case Errc::not_rejected: return "NotRejected";
    case Errc::offer_out_of_range: return "OfferOutOfRange";
    case Errc::config_invalid: return "ConfigInvalid";
    case Errc::no_comparators: return "NoComparators";
    case Errc::bracket_failure: return "BracketFailure";
    case Errc::beliefs_not_intermediate: return "BeliefsNotIntermediate";
    case Errc::parse_error: return "ParseError";
    case Errc::validation_error: return "ValidationError";
  }
  return "UnknownError";
}

WorkerSet WorkerSet::all(int n) {
  if (n < 0 || n > kMaxWorkers) fail(Errc::universe_too_large, "worker count out of range");
  if (n == 0) return WorkerSet();
  return from_mask(n == 32 ? ~0u : ((1u << n) - 1u));
}

WorkerSet WorkerSet::with(WorkerId id) const {
  if (id < 0 || id >= kMaxWorkers) fail(Errc::index_out_of_range, "worker id out of range");
  return from_mask(bits_ | (1u << id));
}

WorkerSet WorkerSet::without(WorkerId id) const {
  if (id < 0 || id >= kMaxWorkers) fail(Errc::index_out_of_range, "worker id out of range");
  return from_mask(bits_ & ~(1u << id));
}

std::vector<WorkerId> WorkerSet::ids() const {
  std::vector<WorkerId> out;
  for (int i = 0; i < kMaxWorkers; ++i)
    if ((bits_ >> i) & 1u) out.push_back(i);
  return out;
}

std::string WorkerSet::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (WorkerId id : ids()) {
    if (!first) os << ',';
    os << id;
    first = false;
  }
  os << '}';
  return os.str();
}

void ModelParams::validate() const {
  auto bad = [](const std::string& msg) { fail(Errc::validation_error, msg); };
  if (!(std::isfinite(s_low) && std::isfinite(s_high))) bad("surpluses must be finite");
  if (!(s_low > 0)) bad("s_low must be positive");
  if (!(s_high > s_low)) bad("s_high must exceed s_low");
  if (!(p > 0 && p < 1)) bad("p must lie in (0,1)");
  if (!(beta > 0 && beta <= 1)) bad("beta must lie in (0,1]");
  if (!(delta > 0 && delta < 1)) bad("delta must lie in (0,1)");
  if (!(d > 0)) bad("d must be positive");
  // An uninformed worker must prefer a sure s_low to gambling on s_high in a
  // period's final round; otherwise the round-2 settlement behavior breaks.
  if (!(s_low > p * s_high - d)) bad("require s_low > p*s_high - d");
  if (n_workers < 1) bad("n_workers must be at least 1");
  if (n_workers > WorkerSet::kMaxWorkers) bad("n_workers exceeds bitmask capacity");
}

SharingMatrix::SharingMatrix(int n) : n_(n), rho_(static_cast<size_t>(n) * n, 0.0) {
  if (n < 1 || n > WorkerSet::kMaxWorkers) fail(Errc::universe_too_large, "matrix size out of range");
}

SharingMatrix SharingMatrix::symmetric(int n, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) fail(Errc::validation_error, "rho must lie in [0,1]");
  SharingMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) m.rho_[static_cast<size_t>(i) * n + j] = rho;
  return m;
}

SharingMatrix SharingMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  int n = static_cast<int>(rows.size());
  SharingMatrix m(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      fail(Errc::validation_error, "sharing matrix must be square");
    for (int j = 0; j < n; ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

double SharingMatrix::at(WorkerId i, WorkerId j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) fail(Errc::index_out_of_range, "matrix index out of range");
  return rho_[static_cast<size_t>(i) * n_ + j];
}

void SharingMatrix::set(WorkerId i, WorkerId j, double rho) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) fail(Errc::index_out_of_range, "matrix index out of range");
  if (i == j) {
    if (rho != 0.0) fail(Errc::validation_error, "diagonal entries must be zero");
    return;
  }
  if (!(rho >= 0.0 && rho <= 1.0)) fail(Errc::validation_error, "rho must lie in [0,1]");
  rho_[static_cast<size_t>(i) * n_ + j] = rho;
}

bool SharingMatrix::symmetric_scalar(double* rho_out) const {
  double value = n_ > 1 ? rho_[1] : 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      if (i == j) continue;
      if (std::fabs(at(i, j) - value) > kEps) return false;
    }
  if (rho_out) *rho_out = value;
  return true;
}

void SharingMatrix::validate() const {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      double r = rho_[static_cast<size_t>(i) * n_ + j];
      if (i == j && r != 0.0) fail(Errc::validation_error, "diagonal entries must be zero");
      if (!(r >= 0.0 && r <= 1.0)) fail(Errc::validation_error, "rho must lie in [0,1]");
    }
}

WorkerPartition WorkerPartition::all_screeners(int n) {
  WorkerPartition part;
  part.screeners = WorkerSet::all(n);
  part.q_reluctant = 1.0;
  return part;
}

void WorkerPartition::validate(const ModelParams& params) const {
  if (!(screeners & reluctant).empty())
    fail(Errc::partition_violation, "screener and reluctant sets overlap");
  WorkerSet everyone = WorkerSet::all(params.n_workers);
  if ((screeners | reluctant) != everyone)
    fail(Errc::partition_violation, "partition must cover all workers");
  if (!reluctant.empty() && !(q_reluctant > params.p))
    fail(Errc::partition_violation, "q_reluctant must exceed the prior p");
  if (!(q_reluctant > 0 && q_reluctant <= 1.0))
    fail(Errc::partition_violation, "q_reluctant must lie in (0,1]");
}

WageProfile WageProfile::uniform(const WorkerSet& c, double wage) {
  WageProfile w;
  for (WorkerId id : c.ids()) w.offers[id] = wage;
  return w;
}

double WageProfile::at(WorkerId id) const {
  auto it = offers.find(id);
  if (it == offers.end()) fail(Errc::profile_mismatch, "no offer recorded for worker " + std::to_string(id));
  return it->second;
}

bool WageProfile::domain_is(const WorkerSet& c) const {
  WorkerSet dom;
  for (const auto& [id, _] : offers) dom = dom.with(id);
  return dom == c;
}

double WageProfile::sum() const {
  double total = 0.0;
  for (const auto& [_, w] : offers) total += w;
  return total;
}

void WageProfile::validate(const WorkerSet& c) const {
  if (!domain_is(c)) fail(Errc::profile_mismatch, "offer domain does not match the screening set");
  for (const auto& [id, w] : offers)
    if (!(std::isfinite(w) && w > 0))
      fail(Errc::validation_error, "offer for worker " + std::to_string(id) + " must be positive");
}

}  // namespace screening
