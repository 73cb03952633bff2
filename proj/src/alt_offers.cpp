#include "screening/alt_offers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "screening/observability.hpp"

namespace screening {

namespace {

// Uninformed second-period surplus for the high firm: the worker screens at
// the prior only when p w(s_high) clears w(s_low), and pooling settles at
// w(s_low) either way.
double u2_alt(const ModelParams& params) {
  const RubinsteinWages r = rubinstein_wages(params);
  if (params.p * r.w_high >= r.w_low - kEps) return params.s_high - r.w_h;
  return params.s_high - r.w_low;
}

}  // namespace

double rubinstein_wage(double s, const ModelParams& params) {
  if (!(s > 0.0)) fail(Errc::domain_error, "rubinstein_wage: surplus must be positive");
  return s * (1.0 - params.delta) / (1.0 - params.delta * params.delta);
}

RubinsteinWages rubinstein_wages(const ModelParams& params) {
  RubinsteinWages r;
  r.w_low = rubinstein_wage(params.s_low, params);
  r.w_high = rubinstein_wage(params.s_high, params);
  r.w_h = (1.0 - params.delta) * params.s_high + params.delta * params.delta * r.w_low;
  r.w_h1 = r.w_h - params.beta * (r.w_high - r.w_low);
  return r;
}

AltScreenValues p2_screen_values(double p_hat, const ModelParams& params) {
  if (!(p_hat >= 0.0 && p_hat <= 1.0)) {
    fail(Errc::domain_error, "p2_screen_values: belief outside [0,1]");
  }
  const RubinsteinWages r = rubinstein_wages(params);
  AltScreenValues v;
  v.w_h = r.w_h;
  v.v_s = p_hat * r.w_h + (1.0 - p_hat) * params.delta * params.delta * r.w_low;
  v.screens = p_hat * r.w_high >= r.w_low - kEps;
  return v;
}

double p1_separating_wage(const ModelParams& params) { return rubinstein_wages(params).w_h1; }

double firm_payoff_alt(const WorkerSet& a, const WorkerSet& c, const WageProfile& w,
                       const ModelParams& params, const SharingMatrix& m) {
  if (!a.subset_of(c)) fail(Errc::subset_violation, "firm_payoff_alt: A not within C");
  if (!w.domain_is(c)) fail(Errc::profile_mismatch, "firm_payoff_alt: wage domain is not C");

  const RubinsteinWages r = rubinstein_wages(params);
  const double hi = params.s_high;
  const double u2 = u2_alt(params);
  const WorkerSet rejected = c - a;

  double total = 0.0;
  for (WorkerId i : a.ids()) total += hi - w.at(i) + params.beta * (hi - r.w_high);

  for (WorkerId j = 0; j < m.n(); ++j) {
    if (c.contains(j)) continue;
    const double pa = observe_prob(j, a, m);
    const double pr = observe_prob(j, rejected, m);
    total += hi - r.w_low +
             params.beta * (pa * (hi - r.w_high) +
                            (1.0 - pa) * (pr * (hi - r.w_low) + (1.0 - pr) * u2));
  }

  for (WorkerId j : rejected.ids()) {
    const double pa = observe_prob(j, a, m);
    total += params.delta * (hi - params.delta * r.w_low) +
             params.beta * (pa * (hi - r.w_high) + (1.0 - pa) * (hi - r.w_low));
  }
  return total;
}

double wbar_alt(const WorkerSet& c, const ModelParams& params, const SharingMatrix& m) {
  if (c.empty()) return 0.0;
  const RubinsteinWages r = rubinstein_wages(params);
  const double pbar = expected_observers(c, m);
  return c.size() * r.w_h - params.beta * (r.w_high - r.w_low) * (pbar + c.size());
}

bool lowtype_constraint(const WorkerSet& a, const WageProfile& w, const ModelParams& params,
                        const SharingMatrix& m) {
  if (a.empty()) fail(Errc::empty_set, "lowtype_constraint: A is empty");
  const RubinsteinWages r = rubinstein_wages(params);
  double gain = 0.0;
  for (WorkerId i : a.ids()) gain += r.w_low - w.at(i);
  const double lhs =
      params.beta * (expected_observers(a, m) + a.size()) * (params.s_low - r.w_low);
  return lhs >= gain - kEps;
}

PoolDeviateCheck pool_deviate_feasible(const WorkerSet& c, WorkerId j, const ModelParams& params,
                                       const SharingMatrix& m) {
  if (c.contains(j)) fail(Errc::member_query, "pool_deviate_feasible: j already screens");
  const RubinsteinWages r = rubinstein_wages(params);
  const WorkerSet cj = c.with(j);
  PoolDeviateCheck out;
  out.lhs = params.beta * (expected_observers(cj, m) / cj.size() + 1.0);
  out.rhs =
      (1.0 - params.delta) * (params.s_low - params.s_high) / (params.s_low - r.w_high);
  out.feasible = out.lhs >= out.rhs - kEps;
  out.sufficient = params.beta >= out.rhs - kEps;
  return out;
}

BeliefInterval intermediate_beliefs_range(const ModelParams& params) {
  BeliefInterval b;
  const double d2 = params.delta * params.delta;
  const double ratio = params.s_high / params.s_low;
  b.lower = (1.0 - d2) / ((2.0 - d2 - params.beta) * ratio + params.beta - 1.0);
  b.upper = params.s_low / params.s_high;
  b.empty = b.lower > b.upper + kEps;
  b.contains_p = !b.empty && params.p >= b.lower - kEps && params.p <= b.upper + kEps;
  return b;
}

AltWorkerValues worker_values_alt(WorkerId i, const WorkerSet& c, const WageProfile& w,
                                  const ModelParams& params, const SharingMatrix& m) {
  if (!w.domain_is(c)) fail(Errc::profile_mismatch, "worker_values_alt: wage domain is not C");

  const RubinsteinWages r = rubinstein_wages(params);
  const AltScreenValues prior = p2_screen_values(params.p, params);
  const double v2 = prior.screens ? prior.v_s : r.w_low;
  const double d2 = params.delta * params.delta;

  const bool member = c.contains(i);
  const WorkerSet ambient = member ? c.without(i) : c;
  const double hat_wage = wbar_alt(ambient.with(i), params, m) - wbar_alt(ambient, params, m);
  const double own_wage = member ? w.at(i) : hat_wage;

  auto screen_at = [&](double wage) {
    return params.p * (wage + r.w_high) + (1.0 - params.p) * (d2 * r.w_low + r.w_low);
  };
  const double p_i = observe_prob(i, ambient, m);

  AltWorkerValues v;
  v.deviation_offer = own_wage;
  v.screen_value = screen_at(own_wage);
  // Dropping to the pooling wage kills all other screening offers, so the
  // deviator carries the prior into period 2.
  v.screen_to_pool_deviation = r.w_low + v2;
  v.pool_value = r.w_low + params.p * (p_i * r.w_high + (1.0 - p_i) * v2) +
                 (1.0 - params.p) * r.w_low;
  v.pool_to_screen_deviation = screen_at(hat_wage);
  return v;
}

VerificationReport verify_equilibrium_alt(const EquilibriumCandidate& cand,
                                          const ModelParams& params, const SharingMatrix& m) {
  double rho = 0.0;
  if (!m.symmetric_scalar(&rho)) {
    fail(Errc::asymmetric_matrix, "verify_equilibrium_alt requires a scalar-symmetric matrix");
  }
  const BeliefInterval beliefs = intermediate_beliefs_range(params);
  if (beliefs.empty || !beliefs.contains_p) {
    fail(Errc::beliefs_not_intermediate,
         "verify_equilibrium_alt: prior outside the intermediate range");
  }
  if (!cand.omega.domain_is(cand.c)) {
    fail(Errc::profile_mismatch, "verify_equilibrium_alt: wage domain is not C");
  }

  const WorkerSet c = cand.c;
  const RubinsteinWages r = rubinstein_wages(params);
  VerificationReport rep;

  CheckResult sep;
  sep.slack = r.w_h1 - r.w_low;
  sep.pass = c.empty() || sep.slack >= -kEps;
  rep.separating_wage = sep;

  if (!c.empty()) {
    if (c.size() > 16) {
      fail(Errc::universe_too_large, "acceptance enumeration capped at 16 screeners");
    }
    const std::vector<WorkerId> members = c.ids();
    const int k = static_cast<int>(members.size());
    const std::uint32_t count = 1u << k;
    std::vector<double> pi(count);
    for (std::uint32_t s = 0; s < count; ++s) {
      std::uint32_t mask = 0;
      for (int bit = 0; bit < k; ++bit)
        if ((s >> bit) & 1u) mask |= 1u << members[bit];
      pi[s] = firm_payoff_alt(WorkerSet::from_mask(mask), c, cand.omega, params, m);
    }
    const double pi_all = pi.back();
    const double pi_none = pi.front();

    rep.firm_indifference.slack = pi_all - pi_none;
    rep.firm_indifference.pass = std::fabs(rep.firm_indifference.slack) <= kEps;

    double pi_best = -std::numeric_limits<double>::infinity();
    for (double v : pi) pi_best = std::max(pi_best, v);
    rep.firm_optimality.slack = pi_all - pi_best;
    rep.firm_optimality.pass = rep.firm_optimality.slack >= -kEps;

    // Take-the-money-and-run at A=C; with unequal offers smaller sets can
    // bind, but at the uniform wages checked here A=C is the binding case.
    double gain = 0.0;
    for (WorkerId i : c.ids()) gain += r.w_low - cand.omega.at(i);
    rep.lowtype_bound.slack =
        params.beta * (expected_observers(c, m) + c.size()) * (params.s_low - r.w_low) - gain;
    rep.lowtype_bound.pass = rep.lowtype_bound.slack >= -kEps;

    for (int bit = 0; bit < k; ++bit) {
      const WorkerId i = members[bit];
      const std::uint32_t own_bit = 1u << bit;
      double best = -std::numeric_limits<double>::infinity();
      for (std::uint32_t s = 0; s < count; ++s) {
        if ((s & own_bit) == 0) best = std::max(best, pi[s]);
      }
      rep.empty_in_chi.push_back({i, pi_none >= best - kEps, pi_none - best, false});

      const AltWorkerValues wv = worker_values_alt(i, c, cand.omega, params, m);
      const double slack = wv.screen_value - wv.screen_to_pool_deviation;
      rep.screener_ic.push_back({i, slack >= -kEps, slack, false});
    }
  } else {
    rep.firm_indifference.pass = true;
    rep.firm_optimality.pass = true;
    rep.lowtype_bound.pass = true;
    NoScreenDiagnostics d;
    d.screening_unprofitable = params.p * r.w_high <= r.w_low + kEps;
    const WorkerSet everyone = WorkerSet::all(m.n());
    d.pbar_ratio = expected_observers(everyone, m) / m.n();
    d.scalar_rho = true;
    d.rhs_with_delta = params.delta * (m.n() - 1) * rho;
    d.rhs_plain = (m.n() - 1) * rho;
    d.holds_with_delta = d.pbar_ratio <= d.rhs_with_delta + kEps;
    d.holds_plain = d.pbar_ratio <= d.rhs_plain + kEps;
    rep.no_screen = d;
  }

  for (WorkerId j : (WorkerSet::all(m.n()) - c).ids()) {
    const AltWorkerValues wv = worker_values_alt(j, c, cand.omega, params, m);
    const double slack = wv.pool_value - wv.pool_to_screen_deviation;
    const bool gated = !pool_deviate_feasible(c, j, params, m).feasible;
    rep.pooler_ic.push_back({j, gated || slack >= -kEps, slack, gated});
  }

  rep.verdict = rep.firm_indifference.pass && rep.firm_optimality.pass &&
                rep.lowtype_bound.pass && rep.separating_wage->pass;
  for (const WorkerCheck& w : rep.empty_in_chi) rep.verdict = rep.verdict && w.pass;
  for (const WorkerCheck& w : rep.screener_ic) rep.verdict = rep.verdict && w.pass;
  for (const WorkerCheck& w : rep.pooler_ic) rep.verdict = rep.verdict && w.pass;
  return rep;
}

std::vector<EquilibriumCandidate> find_symmetric_equilibria_alt(const ModelParams& params,
                                                                const SharingMatrix& m) {
  double rho = 0.0;
  if (!m.symmetric_scalar(&rho)) {
    fail(Errc::asymmetric_matrix,
         "find_symmetric_equilibria_alt requires a scalar-symmetric matrix");
  }

  std::vector<EquilibriumCandidate> found;
  for (int k = 0; k <= m.n(); ++k) {
    WorkerSet c;
    for (int b = 0; b < k; ++b) c = c.with(b);
    EquilibriumCandidate cand;
    cand.c = c;
    if (k > 0) {
      const double wage = wbar_alt(c, params, m) / k;
      if (!(wage > 0.0)) continue;
      cand.omega = WageProfile::uniform(c, wage);
    }
    if (verify_equilibrium_alt(cand, params, m).verdict) found.push_back(cand);
  }
  return found;
}

}  // namespace screening
