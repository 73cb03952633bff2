#include "screening/discrimination.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

#include "screening/observability.hpp"

namespace screening {

namespace {

// Believed per-period output of worker j at the high firm. Statistical mode
// shaves c off every protected worker; the other modes leave output alone.
double output_hi(WorkerId j, const ModelParams& params, const DiscriminationConfig& cfg) {
  if (cfg.mode == DiscMode::Statistical && cfg.protected_set.contains(j)) {
    return params.s_high - cfg.c;
  }
  return params.s_high;
}

// Second-period surplus against an uninformed worker whose believed output is
// out: the worker demands a screening wage when the prior clears s_low against
// that output, otherwise settles at s_low.
double u2_uninformed_out(WorkerId j, double out, const ModelParams& params,
                         const WorkerPartition* partition) {
  if (partition != nullptr && partition->reluctant.contains(j)) return out - params.s_low;
  const bool screens = params.p * out >= params.s_low - kEps;
  return screens ? params.delta * (out - params.s_low) : out - params.s_low;
}

// Second-period receipts for worker i still at the prior, honoring the
// reluctance cutoff when the partition marks i.
P2Receipts receipts_prior(WorkerId i, const ModelParams& params,
                          const WorkerPartition* partition) {
  if (partition != nullptr && partition->reluctant.contains(i)) {
    if (params.p >= partition->q_reluctant - kEps) {
      return {p2_screening_wage(params), params.delta * params.s_low};
    }
    return {params.s_low, params.s_low};
  }
  return p2_worker_receipts(params.p, params);
}

bool screens_at_prior(WorkerId i, const ModelParams& params, const WorkerPartition* partition) {
  if (partition != nullptr && partition->reluctant.contains(i)) {
    return params.p >= partition->q_reluctant - kEps;
  }
  return params.p * params.s_high >= params.s_low - kEps;
}

// Total expected damages the high firm owes across rejected protected
// screeners whose offers sit in claim range.
double expected_damages(const WorkerSet& a, const WorkerSet& c, const WageProfile& w,
                        const ModelParams& params, const SharingMatrix& m,
                        const DiscriminationConfig& cfg) {
  if (cfg.ell <= 0.0) return 0.0;
  double total = 0.0;
  for (WorkerId i : (c - a).ids()) {
    if (!cfg.protected_set.contains(i)) continue;
    const double wi = w.at(i);
    if (!(wi > params.s_low && wi <= params.s_high)) continue;
    total += cfg.ell * lawsuit_prob(i, a, c, w, m, params, cfg);
  }
  return total;
}

}  // namespace

void DiscriminationConfig::validate(const ModelParams& params) const {
  auto bad = [](const std::string& msg) { fail(Errc::config_invalid, msg); };
  if (!protected_set.subset_of(WorkerSet::all(params.n_workers))) {
    bad("protected workers must lie inside the universe");
  }
  if (!(std::isfinite(ell) && ell >= 0.0)) bad("ell must be finite and nonnegative");
  if (!(alpha >= 0.0 && alpha <= 1.0)) bad("alpha must lie in [0,1]");
  if (!(std::isfinite(c) && c >= 0.0)) bad("c must be finite and nonnegative");
  if (!(params.s_high - c > params.s_low)) bad("c must keep s_high - c above s_low");
}

double lawsuit_prob(WorkerId i, const WorkerSet& a, const WorkerSet& c, const WageProfile& w,
                    const SharingMatrix& m, const ModelParams& params,
                    const DiscriminationConfig& cfg) {
  if (!cfg.protected_set.contains(i)) {
    fail(Errc::domain_error, "lawsuit_prob: worker is not protected");
  }
  if (!a.subset_of(c)) fail(Errc::subset_violation, "lawsuit_prob: A not within C");
  if (!c.contains(i) || a.contains(i)) {
    fail(Errc::not_rejected, "lawsuit_prob: worker was not rejected");
  }
  const double wi = w.at(i);
  if (!(wi > params.s_low && wi <= params.s_high)) {
    fail(Errc::offer_out_of_range, "lawsuit_prob: offer outside (s_low, s_high]");
  }

  double miss = 1.0;
  for (WorkerId j : a.ids()) {
    if (cfg.protected_set.contains(j)) continue;
    const double wj = w.at(j);
    const bool comparable = cfg.narrow_comparator ? wj >= wi : wj > params.s_low;
    if (comparable) miss *= 1.0 - m.at(i, j);
  }
  return 1.0 - miss;
}

double firm_payoff_disc(const WorkerSet& a, const WorkerSet& c, const WageProfile& w,
                        const ModelParams& params, const SharingMatrix& m,
                        const DiscriminationConfig& cfg, const WorkerPartition* partition) {
  cfg.validate(params);
  if (!a.subset_of(c)) fail(Errc::subset_violation, "firm_payoff_disc: A not within C");
  if (!w.domain_is(c)) fail(Errc::profile_mismatch, "firm_payoff_disc: wage domain is not C");

  const double lo = params.s_low;
  const WorkerSet rejected = c - a;

  double total = 0.0;
  for (WorkerId i : a.ids()) total += output_hi(i, params, cfg) - w.at(i);

  for (WorkerId j = 0; j < m.n(); ++j) {
    if (c.contains(j)) continue;
    const double out = output_hi(j, params, cfg);
    const double pa = observe_prob(j, a, m);
    const double pr = observe_prob(j, rejected, m);
    const double u2 = u2_uninformed_out(j, out, params, partition);
    total += (out - lo) + params.beta * (1.0 - pa) * (pr * (out - lo) + (1.0 - pr) * u2);
  }

  for (WorkerId j : rejected.ids()) {
    const double out = output_hi(j, params, cfg);
    const double pa = observe_prob(j, a, m);
    total += params.delta * (out - lo) + params.beta * (1.0 - pa) * (out - lo);
  }

  total -= expected_damages(a, c, w, params, m, cfg);
  if (cfg.mode == DiscMode::TasteBased) {
    total -= cfg.c * (1.0 + params.beta) * cfg.protected_set.size();
  }
  return total;
}

WorkerValues worker_values_disc(WorkerId i, const WorkerSet& c, const WageProfile& w,
                                const ModelParams& params, const SharingMatrix& m,
                                const DiscriminationConfig& cfg,
                                const WorkerPartition* partition) {
  cfg.validate(params);
  WorkerValues v = worker_values(i, c, w, params, m, partition);
  if (cfg.mode != DiscMode::Perception || !cfg.protected_set.contains(i)) return v;

  const double cost = cfg.c;
  const bool member = c.contains(i);
  const WorkerSet ambient = member ? c.without(i) : c;
  const double p_i = observe_prob(i, ambient, m);
  const bool screens = screens_at_prior(i, params, partition);
  const double own_wage = member ? w.at(i) : v.wtilde_used;

  // Proposal charges: the screening paths pay in period one when the offer
  // sits above s_low and again in period two after learning the firm is high.
  const double screen_p1 = own_wage > params.s_low ? cost : 0.0;
  const double dev_p1 = v.wtilde_used > params.s_low ? cost : 0.0;
  v.screen_value -= screen_p1 + params.p * params.beta * cost;
  v.pool_to_screen_deviation -= dev_p1 + params.p * params.beta * cost;

  // Pooling paths pay only in period two: after seeing a high wage the worker
  // demands s_high, and an uninformed worker pays when the prior screens.
  const double screens_cost = screens ? cost : 0.0;
  v.pool_value -= params.beta * (params.p * p_i * cost + (1.0 - p_i) * screens_cost);
  v.screen_to_pool_deviation -= params.beta * screens_cost;
  return v;
}

EntrapmentReport entrapment_value(WorkerId i, const WorkerSet& c, const WageProfile& w,
                                  const ModelParams& params, const SharingMatrix& m,
                                  const DiscriminationConfig& cfg,
                                  const WorkerPartition* partition) {
  cfg.validate(params);
  if (!cfg.protected_set.contains(i)) {
    fail(Errc::domain_error, "entrapment_value: worker is not protected");
  }
  if (c.contains(i)) fail(Errc::member_query, "entrapment_value: worker already screens");
  if ((c - cfg.protected_set).empty()) {
    fail(Errc::no_comparators, "entrapment_value: no unprotected screeners to compare against");
  }
  if (!w.domain_is(c)) fail(Errc::profile_mismatch, "entrapment_value: wage domain is not C");

  const double wt = wtilde(c, i, params, m);
  if (wt >= params.s_high - kEps) {
    fail(Errc::offer_out_of_range, "entrapment_value: no rejectable offer within claim range");
  }

  // Comparators a claim can rest on: unprotected members whose accepted wage
  // sits above s_low.
  WorkerSet comp;
  for (WorkerId j : (c - cfg.protected_set).ids()) {
    if (w.at(j) > params.s_low) comp = comp.with(j);
  }
  const double p_law = observe_prob(i, comp, m);
  const double p_info = observe_prob(i, c, m);
  const P2Receipts r = receipts_prior(i, params, partition);

  const double hi = params.s_high, lo = params.s_low;
  const double pool_p2 = params.p * (p_info * hi + (1.0 - p_info) * r.v_high) +
                         (1.0 - params.p) * (p_info * lo + (1.0 - p_info) * r.v_low);

  EntrapmentReport rep;
  rep.entrap_offer = hi;
  rep.acceptable_offer = wt + p_law * cfg.ell;
  rep.entrapment_value = params.delta * lo + params.p * cfg.alpha * cfg.ell * p_law +
                         params.beta * pool_p2;
  rep.acceptable_offer_value = params.p * (rep.acceptable_offer + params.beta * hi) +
                               (1.0 - params.p) * (params.delta * lo + params.beta * lo);

  if (cfg.mode == DiscMode::Perception) {
    const bool screens = screens_at_prior(i, params, partition);
    const double screens_cost = screens ? cfg.c : 0.0;
    rep.entrapment_value -=
        cfg.c + params.beta * (params.p * p_info * cfg.c + (1.0 - p_info) * screens_cost);
    const double accept_p1 = rep.acceptable_offer > lo ? cfg.c : 0.0;
    rep.acceptable_offer_value -= accept_p1 + params.p * params.beta * cfg.c;
  }

  rep.dominated = rep.acceptable_offer_value >= rep.entrapment_value - kEps;
  return rep;
}

WbarDiscResult wbar_disc(const WorkerSet& c, const ModelParams& params, const SharingMatrix& m,
                         const DiscriminationConfig& cfg) {
  cfg.validate(params);

  // The accept-all versus reject-all gap falls one for one in the wage sum, so
  // the indifference point is the root of a monotone function of the sum.
  auto gap_at = [&](const WorkerSet& cc, double wsum) {
    const WageProfile w = WageProfile::uniform(cc, wsum / cc.size());
    return firm_payoff_disc(cc, cc, w, params, m, cfg) -
           firm_payoff_disc(WorkerSet{}, cc, w, params, m, cfg);
  };
  auto solve = [&](const WorkerSet& cc) {
    if (cc.empty()) return 0.0;
    // Start from the natural window and grow it geometrically when the root
    // lies outside; a negative root is legitimate and callers discard it.
    double lo = 0.0, hi = cc.size() * params.s_high;
    double step = hi - lo;
    for (int grow = 0; gap_at(cc, lo) < 0.0; ++grow, step *= 2.0) {
      if (grow == 60) fail(Errc::bracket_failure, "wbar_disc: no lower bracket");
      hi = lo;
      lo -= step;
    }
    step = cc.size() * params.s_high;
    for (int grow = 0; gap_at(cc, hi) > 0.0; ++grow, step *= 2.0) {
      if (grow == 60) fail(Errc::bracket_failure, "wbar_disc: no upper bracket");
      lo = hi;
      hi += step;
    }
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      if (gap_at(cc, mid) >= 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  WbarDiscResult res;
  res.wage_sum = solve(c);
  const double base_avg = c.empty() ? -std::numeric_limits<double>::infinity()
                                    : res.wage_sum / c.size();
  for (WorkerId i = 0; i < m.n(); ++i) {
    if (c.contains(i)) continue;
    const WorkerSet bigger = c.with(i);
    const double avg = solve(bigger) / bigger.size();
    const bool up = avg >= base_avg - kEps;
    if (cfg.protected_set.contains(i)) {
      res.increasing_protected = res.increasing_protected && up;
    } else {
      res.increasing_unprotected = res.increasing_unprotected && up;
    }
  }
  return res;
}

VerificationReport verify_equilibrium_disc(const EquilibriumCandidate& cand,
                                           const ModelParams& params, const SharingMatrix& m,
                                           const WorkerPartition& partition,
                                           const DiscriminationConfig& cfg) {
  cfg.validate(params);
  return detail::verify_with(
      cand.c, cand.omega, params, m, partition,
      [&](const WorkerSet& a) {
        return firm_payoff_disc(a, cand.c, cand.omega, params, m, cfg);
      },
      [&](WorkerId i) {
        return worker_values_disc(i, cand.c, cand.omega, params, m, cfg, &partition);
      });
}

std::vector<EquilibriumCandidate> find_symmetric_equilibria_disc(
    const ModelParams& params, const SharingMatrix& m, const WorkerPartition& partition,
    const DiscriminationConfig& cfg) {
  double rho = 0.0;
  if (!m.symmetric_scalar(&rho)) {
    fail(Errc::asymmetric_matrix,
         "find_symmetric_equilibria_disc requires a scalar-symmetric matrix");
  }
  partition.validate(params);
  cfg.validate(params);

  std::vector<EquilibriumCandidate> found;
  const std::vector<WorkerId> pool = partition.screeners.ids();
  for (int k = 0; k <= static_cast<int>(pool.size()); ++k) {
    WorkerSet c;
    for (int b = 0; b < k; ++b) c = c.with(pool[b]);
    EquilibriumCandidate cand;
    cand.c = c;
    if (k > 0) {
      const double wage = wbar_disc(c, params, m, cfg).wage_sum / k;
      if (!(wage > 0.0)) continue;
      cand.omega = WageProfile::uniform(c, wage);
    }
    if (verify_equilibrium_disc(cand, params, m, partition, cfg).verdict) {
      found.push_back(cand);
    }
  }
  return found;
}

PenaltyIrrelevanceReport penalty_irrelevance_check(const ModelParams& params,
                                                   const SharingMatrix& m,
                                                   const WorkerPartition& partition,
                                                   const DiscriminationConfig& cfg,
                                                   const std::vector<double>& ell_grid) {
  PenaltyIrrelevanceReport rep;
  rep.ell_grid = ell_grid;

  for (double ell : ell_grid) {
    DiscriminationConfig cfg_ell = cfg;
    cfg_ell.ell = ell;
    const std::vector<EquilibriumCandidate> eqs =
        find_symmetric_equilibria_disc(params, m, partition, cfg_ell);

    std::vector<EquilibriumOutcome> row;
    for (const EquilibriumCandidate& e : eqs) {
      EquilibriumOutcome o;
      o.size = e.c.size();
      o.wage = e.c.empty() ? 0.0 : e.omega.at(e.c.ids().front());
      row.push_back(o);

      if (e.c.empty() || (e.c - cfg_ell.protected_set).empty()) continue;
      for (WorkerId i = 0; i < m.n(); ++i) {
        if (e.c.contains(i) || !cfg_ell.protected_set.contains(i)) continue;
        try {
          const EntrapmentReport er =
              entrapment_value(i, e.c, e.omega, params, m, cfg_ell, &partition);
          rep.entrapment_dominated = rep.entrapment_dominated && er.dominated;
        } catch (const ModelError& err) {
          // No rejectable offer in claim range means the entrapment play is
          // unavailable, which cannot overturn dominance.
          if (err.code() != Errc::offer_out_of_range) throw;
        }
      }
    }
    rep.outcomes.push_back(std::move(row));
  }

  auto same_rows = [](const std::vector<EquilibriumOutcome>& a,
                      const std::vector<EquilibriumOutcome>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t t = 0; t < a.size(); ++t) {
      if (a[t].size != b[t].size || std::fabs(a[t].wage - b[t].wage) > 1e-9) return false;
    }
    return true;
  };
  rep.identical = true;
  for (std::size_t g = 1; g < rep.outcomes.size(); ++g) {
    rep.identical = rep.identical && same_rows(rep.outcomes.front(), rep.outcomes[g]);
  }
  return rep;
}

LowTypePolicyReport lowtype_policy(const ModelParams& params, const SharingMatrix& m,
                                   const DiscriminationConfig& cfg,
                                   const DetectionHook& detection) {
  cfg.validate(params);
  LowTypePolicyReport rep;
  const WorkerSet outside = WorkerSet::all(m.n()) - cfg.protected_set;
  const double unit_cost = cfg.mode == DiscMode::TasteBased ? cfg.c : 0.0;

  double sum_d = 0.0;
  int count = 0;
  for (WorkerId i : cfg.protected_set.ids()) {
    const double d = detection ? detection(i, params, m, cfg) : observe_prob(i, outside, m);
    sum_d += d;
    ++count;
  }
  rep.detection_prob = count > 0 ? sum_d / count : 0.0;
  rep.reject_cost = cfg.ell * sum_d;
  rep.accept_cost = unit_cost * count;
  rep.accept_protected = rep.reject_cost > rep.accept_cost;

  rep.ell_threshold = rep.detection_prob > 0.0
                          ? unit_cost / rep.detection_prob
                          : std::numeric_limits<double>::infinity();
  double rho = 0.0;
  const int k_out = outside.size();
  if (m.symmetric_scalar(&rho) && cfg.ell > 0.0 && unit_cost < cfg.ell && k_out >= 1) {
    rep.rho_threshold = 1.0 - std::pow(1.0 - unit_cost / cfg.ell, 1.0 / k_out);
  } else {
    rep.rho_threshold = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

}  // namespace screening
