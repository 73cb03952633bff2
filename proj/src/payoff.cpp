#include "screening/payoff.hpp"

#include <cmath>

#include "screening/observability.hpp"

namespace screening {

namespace {

bool is_reluctant(WorkerId i, const WorkerPartition* partition) {
  return partition != nullptr && partition->reluctant.contains(i);
}

// High firm's second-period surplus against an uninformed worker at prior p.
double u2_uninformed(WorkerId j, const ModelParams& params,
                     const WorkerPartition* partition) {
  if (is_reluctant(j, partition)) return params.s_high - params.s_low;
  return p2_decision(params.p, params).firm_value_high;
}

// Type-conditional second-period receipts for worker i at belief q, honoring
// the reluctance cutoff when the partition marks i.
P2Receipts receipts_at(WorkerId i, double q, const ModelParams& params,
                       const WorkerPartition* partition) {
  // At a degenerate belief the firm cannot pass as low anymore: rejecting
  // only delays the same demand, so the worker extracts the whole surplus.
  if (q >= 1.0 - kEps) return {params.s_high, params.delta * params.s_low};
  bool screens;
  if (is_reluctant(i, partition)) {
    screens = q >= partition->q_reluctant - kEps;
  } else {
    screens = q * params.s_high >= params.s_low - kEps;
  }
  if (screens) return {p2_screening_wage(params), params.delta * params.s_low};
  return {params.s_low, params.s_low};
}

}  // namespace

double p2_screening_wage(const ModelParams& params) {
  return params.delta * params.s_low + (1.0 - params.delta) * params.s_high;
}

SecondPeriodDecision p2_decision(double q, const ModelParams& params) {
  if (!(q >= 0.0 && q <= 1.0)) fail(Errc::domain_error, "p2_decision: q outside [0,1]");
  SecondPeriodDecision d;
  if (q >= 1.0 - kEps) {
    // Certain of the high type, the worker re-demands the full surplus after
    // any rejection, so the firm's usual accept-up-to-w^s threshold is gone.
    d.screens = true;
    d.worker_value = params.s_high;
    d.firm_value_high = 0.0;
    d.firm_value_low = 0.0;
    return d;
  }
  d.screens = q * params.s_high >= params.s_low - kEps;
  if (d.screens) {
    d.worker_value = q * p2_screening_wage(params) + (1.0 - q) * params.delta * params.s_low;
    d.firm_value_high = params.delta * (params.s_high - params.s_low);
  } else {
    d.worker_value = params.s_low;
    d.firm_value_high = params.s_high - params.s_low;
  }
  d.firm_value_low = 0.0;
  return d;
}

P2Receipts p2_worker_receipts(double q, const ModelParams& params) {
  if (!(q >= 0.0 && q <= 1.0)) {
    fail(Errc::domain_error, "p2_worker_receipts: q outside [0,1]");
  }
  return receipts_at(0, q, params, nullptr);
}

double firm_payoff(const WorkerSet& a, const WorkerSet& c, const WageProfile& w,
                   const ModelParams& params, const SharingMatrix& m,
                   const WorkerPartition* partition) {
  if (!a.subset_of(c)) fail(Errc::subset_violation, "firm_payoff: A not within C");
  if (!w.domain_is(c)) fail(Errc::profile_mismatch, "firm_payoff: wage domain is not C");

  const double hi = params.s_high, lo = params.s_low;
  const double gap = hi - lo;
  const WorkerSet rejected = c - a;

  double total = 0.0;
  for (WorkerId i : a.ids()) total += hi - w.at(i);

  for (WorkerId j = 0; j < m.n(); ++j) {
    if (c.contains(j)) continue;
    const double pa = observe_prob(j, a, m);
    const double pr = observe_prob(j, rejected, m);
    const double u2 = u2_uninformed(j, params, partition);
    total += gap + params.beta * (1.0 - pa) * (pr * gap + (1.0 - pr) * u2);
  }

  for (WorkerId j : rejected.ids()) {
    const double pa = observe_prob(j, a, m);
    total += params.delta * gap + params.beta * (1.0 - pa) * gap;
  }
  return total;
}

SupermodularityReport supermodularity_report(const WorkerSet& c, const WageProfile& w,
                                             const ModelParams& params,
                                             const SharingMatrix& m) {
  if (c.size() > 20) fail(Errc::universe_too_large, "supermodularity_report: |C| exceeds 20");

  const std::vector<WorkerId> members = c.ids();
  const int k = static_cast<int>(members.size());
  const std::uint32_t count = 1u << k;

  // Compressed submask index -> real mask, and memoized payoffs.
  std::vector<std::uint32_t> expand(count, 0);
  std::vector<double> pi(count, 0.0);
  for (std::uint32_t s = 0; s < count; ++s) {
    std::uint32_t mask = 0;
    for (int bit = 0; bit < k; ++bit) {
      if ((s >> bit) & 1u) mask |= 1u << members[bit];
    }
    expand[s] = mask;
    pi[s] = firm_payoff(WorkerSet::from_mask(mask), c, w, params, m);
  }

  SupermodularityReport rep;
  rep.all_rho_interior = true;
  for (WorkerId i = 0; i < m.n() && rep.all_rho_interior; ++i) {
    for (WorkerId j = 0; j < m.n(); ++j) {
      if (i == j) continue;
      const double r = m.at(i, j);
      if (r <= 0.0 || r >= 1.0) {
        rep.all_rho_interior = false;
        break;
      }
    }
  }

  for (std::uint32_t sa = 0; sa < count; ++sa) {
    for (std::uint32_t sb = 0; sb < count; ++sb) {
      const double lhs = pi[sa | sb] + pi[sa & sb];
      const double rhs = pi[sa] + pi[sb];
      ++rep.pairs_checked;
      if (lhs < rhs - kEps) {
        ++rep.violations;
        if (rep.violation_samples.size() < 8) {
          rep.violation_samples.push_back({expand[sa], expand[sb], lhs, rhs});
        }
      }
      const bool strict = lhs > rhs + kEps;
      if (strict) ++rep.strict_pairs;
      const bool nonnested = (sa & ~sb) != 0 && (sb & ~sa) != 0;
      if (nonnested) {
        ++rep.nonnested_pairs;
        if (!strict) ++rep.nonnested_equalities;
      }
    }
  }
  return rep;
}

double wbar(const WorkerSet& c, const ModelParams& params, const SharingMatrix& m) {
  if (c.empty()) return 0.0;
  const double gap = params.s_high - params.s_low;
  return c.size() * (params.s_high - (params.delta + params.beta) * gap) -
         params.beta * expected_observers(c, m) * gap;
}

bool feasible_screening(const WorkerSet& c, const ModelParams& params,
                        const SharingMatrix& m) {
  if (c.empty()) fail(Errc::empty_set, "feasible_screening: empty screening set");
  const double lhs = 1.0 - params.delta - params.beta;
  const double rhs = params.beta * expected_observers(c, m) / c.size();
  return lhs >= rhs - kEps;
}

double wtilde(const WorkerSet& c, WorkerId i, const ModelParams& params,
              const SharingMatrix& m) {
  if (c.contains(i)) fail(Errc::member_query, "wtilde: i already screens");
  const double gap = params.s_high - params.s_low;
  const double u2 = p2_decision(params.p, params).firm_value_high;
  const double dpbar = expected_observers(c.with(i), m) - expected_observers(c, m);
  return params.s_high - (params.delta + params.beta) * gap - params.beta * dpbar * u2;
}

double deviation_wage_indifference(const WorkerSet& c, WorkerId i,
                                   const ModelParams& params, const SharingMatrix& m) {
  if (c.contains(i)) fail(Errc::member_query, "deviation_wage_indifference: i already screens");
  // The payoff difference is linear in the deviator's wage with slope -1, so
  // evaluating it at wage s_low pins the root.
  WageProfile probe;
  for (WorkerId k : c.ids()) probe.offers[k] = params.s_low;
  probe.offers[i] = params.s_low;
  const WorkerSet cand = c.with(i);
  const double accept = firm_payoff(cand, cand, probe, params, m);
  const double reject = firm_payoff(c, cand, probe, params, m);
  return accept - reject + params.s_low;
}

MixedQuantities mixed_quantities(const WorkerSet& c, const ModelParams& params,
                                 const SharingMatrix& m) {
  MixedQuantities q;
  q.p_star = params.s_low / params.s_high;
  if (params.p <= q.p_star) {
    fail(Errc::belief_too_low, "mixed_quantities: p must exceed s_low/s_high");
  }
  q.sigma = (q.p_star / (1.0 - q.p_star)) * ((1.0 - params.p) / params.p);
  const double gap = params.s_high - params.s_low;
  q.wage_sum = c.size() * (params.s_high - params.delta * gap) -
               params.beta * expected_observers(c, m) * params.delta * gap;
  return q;
}

double mixed_screener_payoff(const WorkerSet& c, const ModelParams& params,
                             const SharingMatrix& m, bool sigma_literal) {
  if (c.empty()) fail(Errc::empty_set, "mixed_screener_payoff: empty screening set");
  const MixedQuantities q = mixed_quantities(c, params, m);
  const double wage = q.wage_sum / c.size();
  const double rejected_now = (sigma_literal ? q.sigma : params.delta) * params.s_low;
  return params.p * (1.0 - q.sigma) * (wage + params.beta * params.s_high) +
         ((1.0 - params.p) + q.sigma * params.p) * (rejected_now + params.beta * params.s_low);
}

MixedFirmValues mixed_firm_values(const WorkerSet& c, const ModelParams& params,
                                  const SharingMatrix& m,
                                  const WorkerPartition* partition) {
  if (c.empty()) fail(Errc::empty_set, "mixed_firm_values: empty screening set");
  const MixedQuantities q = mixed_quantities(c, params, m);
  const WageProfile uniform = WageProfile::uniform(c, q.wage_sum / c.size());

  MixedFirmValues v;
  v.accept_all = firm_payoff(c, c, uniform, params, m, partition);

  const double gap = params.s_high - params.s_low;
  const double rescreen = params.delta * gap;  // settled screeners screen again at p_star
  double reject = c.size() * (params.delta * gap + params.beta * rescreen);
  for (WorkerId j = 0; j < m.n(); ++j) {
    if (c.contains(j)) continue;
    const double pc = observe_prob(j, c, m);
    const double seen = is_reluctant(j, partition) ? gap : rescreen;
    reject += gap + params.beta * (pc * seen + (1.0 - pc) * u2_uninformed(j, params, partition));
  }
  v.reject_all = reject;
  v.expected_high = (1.0 - q.sigma) * v.accept_all + q.sigma * v.reject_all;
  return v;
}

double mixed_pooler_payoff(WorkerId j, const WorkerSet& c, double sigma,
                           const ModelParams& params, const SharingMatrix& m,
                           const WorkerPartition* partition) {
  if (c.contains(j)) fail(Errc::member_query, "mixed_pooler_payoff: j screens");
  if (sigma < 0.0 || sigma > 1.0) {
    fail(Errc::domain_error, "mixed_pooler_payoff: sigma outside [0,1]");
  }
  const double p = params.p;
  const double pj = observe_prob(j, c, m);
  const P2Receipts prior = receipts_at(j, p, params, partition);
  const double q_rej = sigma * p / (sigma * p + (1.0 - p));
  const P2Receipts rej = receipts_at(j, q_rej, params, partition);

  const double high_branch = (1.0 - sigma) * (pj * params.s_high + (1.0 - pj) * prior.v_high) +
                             sigma * (pj * rej.v_high + (1.0 - pj) * prior.v_high);
  const double low_branch = pj * rej.v_low + (1.0 - pj) * prior.v_low;
  return params.s_low + params.beta * (p * high_branch + (1.0 - p) * low_branch);
}

WorkerValues worker_values(WorkerId i, const WorkerSet& c, const WageProfile& w,
                           const ModelParams& params, const SharingMatrix& m,
                           const WorkerPartition* partition) {
  if (!w.domain_is(c)) fail(Errc::profile_mismatch, "worker_values: wage domain is not C");

  const bool member = c.contains(i);
  const WorkerSet ambient = member ? c.without(i) : c;
  const double lo = params.s_low, hi = params.s_high;
  const double p = params.p;

  WorkerValues v;
  v.wtilde_used = wtilde(ambient, i, params, m);
  const double own_wage = member ? w.at(i) : v.wtilde_used;

  // Uninformed second-period receipts at the prior.
  const P2Receipts r = receipts_at(i, p, params, partition);
  const double uninformed_value = p * r.v_high + (1.0 - p) * r.v_low;

  const double rejected_branch = params.delta * lo + params.beta * lo;
  v.screen_value = p * (own_wage + params.beta * hi) + (1.0 - p) * rejected_branch;
  v.screen_to_pool_deviation = lo + params.beta * uninformed_value;

  const double pi = observe_prob(i, ambient, m);
  v.pool_value = lo + params.beta * (p * (pi * hi + (1.0 - pi) * r.v_high) +
                                     (1.0 - p) * (pi * lo + (1.0 - pi) * r.v_low));
  v.pool_to_screen_deviation =
      p * (v.wtilde_used + params.beta * hi) + (1.0 - p) * rejected_branch;
  return v;
}

}  // namespace screening
