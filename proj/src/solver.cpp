#include "screening/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "screening/observability.hpp"

namespace screening {

namespace {

// Memoized firm payoffs over every acceptance subset of c, addressed by a
// compressed index with one bit per member (ascending id order).
struct PiTable {
  std::vector<WorkerId> members;
  std::vector<std::uint32_t> expand;  // compressed index -> worker bitmask
  std::vector<double> pi;

  int bit_of(WorkerId id) const {
    for (std::size_t b = 0; b < members.size(); ++b)
      if (members[b] == id) return static_cast<int>(b);
    fail(Errc::member_query, "worker not in the screening set");
  }
};

PiTable build_pi_table(const WorkerSet& c, const detail::PiFn& pi_fn) {
  if (c.size() > 16) fail(Errc::universe_too_large, "acceptance enumeration capped at 16 screeners");
  PiTable t;
  t.members = c.ids();
  const int k = static_cast<int>(t.members.size());
  const std::uint32_t count = 1u << k;
  t.expand.resize(count);
  t.pi.resize(count);
  for (std::uint32_t s = 0; s < count; ++s) {
    std::uint32_t mask = 0;
    for (int bit = 0; bit < k; ++bit)
      if ((s >> bit) & 1u) mask |= 1u << t.members[bit];
    t.expand[s] = mask;
    t.pi[s] = pi_fn(WorkerSet::from_mask(mask));
  }
  return t;
}

std::string check_line(const char* name, bool pass, double slack) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-18s %s (slack %.6g)\n", name, pass ? "PASS" : "FAIL", slack);
  return buf;
}

// Closed-form wage and deviation conditions for an all-screen candidate of
// size k against p_count reluctant poolers under scalar rho. Mirrors what the
// full verifier reduces to when the wage is uniform and poolers never deviate.
bool all_screen_closed_form(int k, int p_count, double rho, const ModelParams& params) {
  const double gap = params.s_high - params.s_low;
  const double pbar = p_count * (1.0 - std::pow(1.0 - rho, k));
  const bool feasible = (1.0 - params.delta - params.beta) >= params.beta * pbar / k - kEps;
  if (!feasible) return false;
  const double wage =
      params.s_high - (params.delta + params.beta) * gap - params.beta * pbar * gap / k;
  if (wage < params.s_low - kEps) return false;
  const double screen = params.p * (wage + params.beta * params.s_high) +
                        (1.0 - params.p) * (params.delta + params.beta) * params.s_low;
  const double stay_pooled =
      params.s_low + params.beta * p2_decision(params.p, params).worker_value;
  return screen >= stay_pooled - kEps;
}

bool all_screen_verifies(int k, int p_count, double rho, double q_reluctant,
                         const ModelParams& params) {
  const int n = k + p_count;
  if (n > WorkerSet::kMaxWorkers || k > 14) {
    return all_screen_closed_form(k, p_count, rho, params);
  }
  ModelParams economy = params;
  economy.n_workers = n;
  SharingMatrix msym = SharingMatrix::symmetric(n, rho);
  WorkerPartition part;
  part.screeners = WorkerSet::all(k);
  part.reluctant = WorkerSet::all(n) - part.screeners;
  part.q_reluctant = q_reluctant;

  const WorkerSet c = part.screeners;
  const double wage = wbar(c, economy, msym) / k;
  if (!(wage > 0.0)) return false;
  EquilibriumCandidate cand{c, WageProfile::uniform(c, wage), 0.0};
  return verify_equilibrium(cand, economy, msym, part).verdict;
}

// Smallest all-screen size that verifies, or 0 when none does within the
// search bound. Pbar is bounded by the pool size, so candidate sizes only get
// easier as k grows; the first hit is the threshold.
int threshold_scan(int p_count, double rho, double q_reluctant, const ModelParams& params) {
  constexpr int kSearchCap = 512;
  for (int k = 1; k <= kSearchCap; ++k) {
    if (all_screen_verifies(k, p_count, rho, q_reluctant, params)) return k;
  }
  return 0;
}

}  // namespace

std::vector<WorkerSet> best_response_sets(WorkerId i, const EquilibriumCandidate& cand,
                                          const ModelParams& params,
                                          const SharingMatrix& m) {
  if (!cand.c.contains(i)) fail(Errc::member_query, "best_response_sets: i does not screen");
  const PiTable t = build_pi_table(cand.c, [&](const WorkerSet& a) {
    return firm_payoff(a, cand.c, cand.omega, params, m);
  });
  const std::uint32_t own_bit = 1u << t.bit_of(i);

  double best = -std::numeric_limits<double>::infinity();
  for (std::uint32_t s = 0; s < t.pi.size(); ++s) {
    if ((s & own_bit) == 0) best = std::max(best, t.pi[s]);
  }
  std::vector<WorkerSet> out;
  for (std::uint32_t s = 0; s < t.pi.size(); ++s) {
    if ((s & own_bit) == 0 && t.pi[s] >= best - kEps) {
      out.push_back(WorkerSet::from_mask(t.expand[s]));
    }
  }
  std::sort(out.begin(), out.end(), [](const WorkerSet& a, const WorkerSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.mask() < b.mask();
  });
  return out;
}

std::string VerificationReport::to_string() const {
  std::string out;
  out += check_line("firm_indifference", firm_indifference.pass, firm_indifference.slack);
  out += check_line("firm_optimality", firm_optimality.pass, firm_optimality.slack);
  out += check_line("lowtype_bound", lowtype_bound.pass, lowtype_bound.slack);
  if (separating_wage) {
    out += check_line("separating_wage", separating_wage->pass, separating_wage->slack);
  }
  char buf[160];
  for (const WorkerCheck& w : empty_in_chi) {
    std::snprintf(buf, sizeof buf, "empty_in_chi[%d]    %s (slack %.6g)\n", w.worker,
                  w.pass ? "PASS" : "FAIL", w.slack);
    out += buf;
  }
  for (const WorkerCheck& w : screener_ic) {
    std::snprintf(buf, sizeof buf, "screener_ic[%d]     %s (slack %.6g)\n", w.worker,
                  w.pass ? "PASS" : "FAIL", w.slack);
    out += buf;
  }
  for (const WorkerCheck& w : pooler_ic) {
    std::snprintf(buf, sizeof buf, "pooler_ic[%d]       %s (slack %.6g)%s\n", w.worker,
                  w.pass ? "PASS" : "FAIL", w.slack,
                  w.gated ? " [deviation wage below floor]" : "");
    out += buf;
  }
  if (no_screen) {
    std::snprintf(buf, sizeof buf,
                  "no_screen: belief_blocks=%d pbar_ratio=%.6g delta_bound=%.6g (%s) "
                  "plain_bound=%.6g (%s)\n",
                  no_screen->screening_unprofitable ? 1 : 0, no_screen->pbar_ratio,
                  no_screen->rhs_with_delta, no_screen->holds_with_delta ? "holds" : "fails",
                  no_screen->rhs_plain, no_screen->holds_plain ? "holds" : "fails");
    out += buf;
  }
  out += std::string("verdict: ") + (verdict ? "PASS" : "FAIL") + "\n";
  return out;
}

VerificationReport detail::verify_with(const WorkerSet& c, const WageProfile& omega,
                                       const ModelParams& params, const SharingMatrix& m,
                                       const WorkerPartition& partition, const PiFn& pi,
                                       const ValuesFn& values) {
  partition.validate(params);
  if (!(c & partition.reluctant).empty()) {
    fail(Errc::partition_violation, "reluctant workers cannot screen");
  }
  if (!omega.domain_is(c)) {
    fail(Errc::profile_mismatch, "verify_equilibrium: wage domain is not C");
  }

  VerificationReport rep;

  if (!c.empty()) {
    const PiTable t = build_pi_table(c, pi);
    const double pi_all = t.pi.back();
    const double pi_none = t.pi.front();

    rep.firm_indifference.slack = pi_all - pi_none;
    rep.firm_indifference.pass = std::fabs(rep.firm_indifference.slack) <= kEps;

    double pi_best = -std::numeric_limits<double>::infinity();
    for (double v : t.pi) pi_best = std::max(pi_best, v);
    rep.firm_optimality.slack = pi_all - pi_best;
    rep.firm_optimality.pass = rep.firm_optimality.slack >= -kEps;

    double min_wage = std::numeric_limits<double>::infinity();
    for (WorkerId i : c.ids()) min_wage = std::min(min_wage, omega.at(i));
    rep.lowtype_bound.slack = min_wage - params.s_low;
    rep.lowtype_bound.pass = rep.lowtype_bound.slack >= -kEps;

    for (WorkerId i : c.ids()) {
      const std::uint32_t own_bit = 1u << t.bit_of(i);
      double best = -std::numeric_limits<double>::infinity();
      for (std::uint32_t s = 0; s < t.pi.size(); ++s) {
        if ((s & own_bit) == 0) best = std::max(best, t.pi[s]);
      }
      rep.empty_in_chi.push_back({i, pi_none >= best - kEps, pi_none - best, false});

      const WorkerValues wv = values(i);
      const double slack = wv.screen_value - wv.screen_to_pool_deviation;
      rep.screener_ic.push_back({i, slack >= -kEps, slack, false});
    }
  } else {
    NoScreenDiagnostics d;
    d.screening_unprofitable = params.p * params.s_high <= params.s_low + kEps;
    const WorkerSet s = partition.screeners;
    d.pbar_ratio = s.empty() ? 0.0 : expected_observers(s, m) / s.size();
    double rho = 0.0;
    d.scalar_rho = m.symmetric_scalar(&rho);
    if (d.scalar_rho) {
      d.rhs_with_delta = params.delta * (m.n() - 1) * rho;
      d.rhs_plain = (m.n() - 1) * rho;
      d.holds_with_delta = d.pbar_ratio <= d.rhs_with_delta + kEps;
      d.holds_plain = d.pbar_ratio <= d.rhs_plain + kEps;
    }
    rep.no_screen = d;
  }

  for (WorkerId j : (partition.screeners - c).ids()) {
    const WorkerValues wv = values(j);
    const double slack = wv.pool_value - wv.pool_to_screen_deviation;
    const bool gated = wv.wtilde_used <= params.s_low + kEps;
    rep.pooler_ic.push_back({j, gated || slack >= -kEps, slack, gated});
  }

  rep.verdict = rep.firm_indifference.pass && rep.firm_optimality.pass && rep.lowtype_bound.pass;
  for (const WorkerCheck& w : rep.empty_in_chi) rep.verdict = rep.verdict && w.pass;
  for (const WorkerCheck& w : rep.screener_ic) rep.verdict = rep.verdict && w.pass;
  for (const WorkerCheck& w : rep.pooler_ic) rep.verdict = rep.verdict && w.pass;
  return rep;
}

VerificationReport verify_equilibrium(const EquilibriumCandidate& cand,
                                      const ModelParams& params, const SharingMatrix& m,
                                      const WorkerPartition& partition) {
  return detail::verify_with(
      cand.c, cand.omega, params, m, partition,
      [&](const WorkerSet& a) { return firm_payoff(a, cand.c, cand.omega, params, m); },
      [&](WorkerId i) { return worker_values(i, cand.c, cand.omega, params, m, &partition); });
}

std::vector<EquilibriumCandidate> find_symmetric_equilibria(const ModelParams& params,
                                                            const SharingMatrix& m,
                                                            const WorkerPartition& partition) {
  double rho = 0.0;
  if (!m.symmetric_scalar(&rho)) {
    fail(Errc::asymmetric_matrix, "find_symmetric_equilibria requires a scalar-symmetric matrix");
  }
  partition.validate(params);

  std::vector<EquilibriumCandidate> found;
  const std::vector<WorkerId> pool = partition.screeners.ids();
  for (int k = 0; k <= static_cast<int>(pool.size()); ++k) {
    WorkerSet c;
    for (int b = 0; b < k; ++b) c = c.with(pool[b]);
    EquilibriumCandidate cand;
    cand.c = c;
    if (k > 0) {
      const double wage = wbar(c, params, m) / k;
      if (!(wage > 0.0)) continue;
      cand.omega = WageProfile::uniform(c, wage);
    }
    if (verify_equilibrium(cand, params, m, partition).verdict) found.push_back(cand);
  }
  return found;
}

ThresholdResult screening_threshold(const ModelParams& params, const SharingMatrix& m,
                                    const WorkerPartition& partition) {
  double rho = 0.0;
  if (!m.symmetric_scalar(&rho)) {
    fail(Errc::asymmetric_matrix, "screening_threshold requires a scalar-symmetric matrix");
  }
  partition.validate(params);

  const int p_count = partition.reluctant.size();
  // With an empty reluctant set the input cutoff is unconstrained; the probe
  // economies add reluctant workers, so push it above the prior.
  const double q =
      partition.q_reluctant > params.p ? partition.q_reluctant : 0.5 * (1.0 + params.p);

  ThresholdResult r;
  r.n_value = threshold_scan(p_count, rho, q, params);
  if (r.n_value == 0) {
    r.note = ExistenceNote::NoScreeningEquilibrium;
  } else {
    r.note = r.n_value == 1 ? ExistenceNote::AlwaysExists : ExistenceNote::ExistsUnderConditions;
  }

  const double rho_probe = rho + 0.05 < 1.0 ? rho + 0.05 : (rho + 1.0) / 2.0;
  r.n_rho_probe = threshold_scan(p_count, rho_probe, q, params);
  r.n_pool_probe = threshold_scan(p_count + 1, rho, q, params);

  auto monotone = [&](int probe) {
    if (r.n_value == 0) return probe == 0;  // none at base implies none at harder settings
    return probe == 0 || probe >= r.n_value;
  };
  r.monotone_probes = monotone(r.n_rho_probe) && monotone(r.n_pool_probe);
  return r;
}

MixedSolution solve_mixed(const ModelParams& params, const SharingMatrix& m,
                          const WorkerSet& c) {
  if (c.empty()) fail(Errc::empty_set, "solve_mixed: empty screening set");
  const MixedQuantities q = mixed_quantities(c, params, m);

  MixedSolution s;
  s.candidate.c = c;
  s.candidate.sigma = q.sigma;
  s.candidate.omega = WageProfile::uniform(c, q.wage_sum / c.size());
  s.p_star = q.p_star;
  s.payoff_mixed = mixed_screener_payoff(c, params, m, false);
  s.payoff_mixed_sigma_literal = mixed_screener_payoff(c, params, m, true);

  const double pure_wage = wbar(c, params, m) / c.size();
  s.payoff_pure_same_set =
      params.p * (pure_wage + params.beta * params.s_high) +
      (1.0 - params.p) * (params.delta + params.beta) * params.s_low;
  s.payoff_no_screen = params.s_low + params.beta * p2_decision(params.p, params).worker_value;
  s.improves_over_no_screen = s.payoff_mixed > s.payoff_no_screen + kEps;
  return s;
}

}  // namespace screening
