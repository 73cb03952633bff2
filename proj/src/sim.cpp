#include "screening/sim.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "screening/alt_offers.hpp"
#include "screening/csv.hpp"
#include "screening/observability.hpp"
#include "screening/payoff.hpp"

namespace screening {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double uniform_draw(std::uint64_t seed, std::uint64_t trial, std::uint64_t site,
                    std::uint64_t lane) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ trial);
  h = mix64(h ^ site);
  h = mix64(h ^ lane);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Binary-counter pairwise summation. The reduction tree depends only on the
// number of terms added, so totals do not drift with batching order.
class PairwiseSum {
 public:
  void add(double x) {
    std::uint64_t c = count_;
    std::size_t level = 0;
    while (c & 1ull) {
      x += stack_[level];
      c >>= 1;
      ++level;
    }
    if (level == stack_.size()) {
      stack_.push_back(x);
    } else {
      stack_[level] = x;
    }
    ++count_;
  }
  double total() const {
    double t = 0.0;
    for (std::size_t l = 0; l < stack_.size(); ++l) {
      if ((count_ >> l) & 1ull) t += stack_[l];
    }
    return t;
  }

 private:
  std::vector<double> stack_;
  std::uint64_t count_ = 0;
};

struct Resolved {
  bool alternating = false;
  double sigma = 0.0;
  double q_rej = 0.0;   // belief after an own or observed rejection
  double floor = 0.0;   // pooling offer level for the variant
  double beta_w = 1.0;  // worker's between-period discount
  RubinsteinWages rw;
  double dev_cut = 0.0;  // largest outsider deviation offer the high firm takes
};

Resolved resolve(const SimConfig& cfg, const ModelParams& params, const SharingMatrix& m,
                 const WorkerPartition& partition) {
  params.validate();
  m.validate();
  partition.validate(params);
  if (m.n() != params.n_workers) {
    fail(Errc::config_invalid, "simulate: sharing matrix size differs from n_workers");
  }
  if (cfg.trials < 1) fail(Errc::config_invalid, "simulate: needs at least one trial");

  const EquilibriumCandidate& prof = cfg.profile;
  if (!prof.c.subset_of(WorkerSet::all(params.n_workers))) {
    fail(Errc::index_out_of_range, "simulate: screening set outside the workforce");
  }
  prof.omega.validate(prof.c);
  if (!(prof.c & partition.reluctant).empty()) {
    fail(Errc::partition_violation, "simulate: reluctant workers cannot hold screening offers");
  }
  if (prof.sigma < 0.0 || prof.sigma > 1.0) {
    fail(Errc::domain_error, "simulate: sigma outside [0,1]");
  }

  Resolved rs;
  rs.alternating = params.variant == Variant::AlternatingOffers;
  rs.sigma = prof.sigma;
  if (rs.alternating) {
    if (rs.sigma > 0.0) {
      fail(Errc::config_invalid, "simulate: randomized rejection needs the baseline game");
    }
    if (cfg.discrimination) {
      fail(Errc::config_invalid, "simulate: penalty rules need the baseline game");
    }
    if (!partition.reluctant.empty()) {
      fail(Errc::config_invalid, "simulate: reluctant workers need the baseline game");
    }
    rs.rw = rubinstein_wages(params);
    rs.floor = rs.rw.w_low;
    rs.beta_w = 1.0;
  } else {
    rs.floor = params.s_low;
    rs.beta_w = params.beta;
  }
  if (cfg.discrimination) {
    cfg.discrimination->validate(params);
    if (cfg.discrimination->mode == DiscMode::Statistical) {
      fail(Errc::config_invalid, "simulate: believed-output mode has no play-level analogue");
    }
    if (rs.sigma > 0.0) {
      fail(Errc::config_invalid, "simulate: penalty rules with firm randomization are unsupported");
    }
  }
  if (cfg.forced.active() && rs.sigma > 0.0) {
    fail(Errc::config_invalid, "simulate: forced deviations need a pure profile");
  }
  if (!cfg.forced.firm_rejects.subset_of(WorkerSet::all(params.n_workers))) {
    fail(Errc::index_out_of_range, "simulate: forced rejection set outside the workforce");
  }
  if (cfg.forced.worker_offer) {
    const auto& [id, wage] = *cfg.forced.worker_offer;
    if (id < 0 || id >= params.n_workers) {
      fail(Errc::index_out_of_range, "simulate: forced offer names no worker");
    }
    if (!std::isfinite(wage) || wage <= 0.0) {
      fail(Errc::domain_error, "simulate: forced offer must be positive and finite");
    }
    if (prof.c.contains(id) && wage > rs.floor + kEps) {
      fail(Errc::config_invalid, "simulate: members can only be forced down to the pooling offer");
    }
    if (!prof.c.contains(id) && wage > rs.floor + kEps) {
      rs.dev_cut = rs.alternating
                       ? wbar_alt(prof.c.with(id), params, m) - wbar_alt(prof.c, params, m)
                       : wtilde(prof.c, id, params, m);
    }
  }
  rs.q_rej = rs.sigma > 0.0 ? rs.sigma * params.p / (rs.sigma * params.p + 1.0 - params.p) : 0.0;
  return rs;
}

bool screens_at(double q, bool reluctant, const ModelParams& params,
                const WorkerPartition& partition) {
  if (reluctant) return q >= partition.q_reluctant - kEps;
  return q * params.s_high >= params.s_low - kEps;
}

struct P2Outcome {
  double wage = 0.0;
  int round = 1;
  bool proposed_high = false;  // worker's opening demand exceeded the pooling level
};

P2Outcome play_p2_simple(double q, bool firm_high, bool reluctant, const ModelParams& params,
                         const WorkerPartition& partition) {
  if (!screens_at(q, reluctant, params, partition)) return {params.s_low, 1, false};
  const double demand = q >= 1.0 - kEps ? params.s_high : p2_screening_wage(params);
  if (firm_high) return {demand, 1, true};
  return {params.s_low, 2, true};
}

P2Outcome play_p2_alt(double q, bool firm_high, const Resolved& rs, const ModelParams& params) {
  if (q >= 1.0 - kEps) return {firm_high ? rs.rw.w_high : rs.rw.w_low, 1, true};
  if (q * rs.rw.w_high < rs.rw.w_low - kEps) return {rs.rw.w_low, 1, false};
  if (firm_high) return {rs.rw.w_h, 1, true};
  return {params.delta * rs.rw.w_low, 2, true};
}

EpisodeRecord run_episode(const SimConfig& cfg, const Resolved& rs, const ModelParams& params,
                          const SharingMatrix& m, const WorkerPartition& partition,
                          std::uint64_t trial) {
  const int n = params.n_workers;
  const WorkerSet c = cfg.profile.c;

  EpisodeRecord e;
  e.trial = trial;
  e.wage1.assign(n, 0.0);
  e.wage2.assign(n, 0.0);
  e.round1.assign(n, 1);
  e.round2.assign(n, 1);
  e.worker_value.assign(n, 0.0);

  e.firm_high = uniform_draw(cfg.seed, trial, kSiteFirmType, 0) < params.p;
  const bool coin_reject =
      rs.sigma > 0.0 && uniform_draw(cfg.seed, trial, kSiteRejectCoin, 0) < rs.sigma;

  const WorkerId dev = cfg.forced.worker_offer ? cfg.forced.worker_offer->first : -1;
  std::vector<double> offer(n, 0.0);
  for (WorkerId i = 0; i < n; ++i) {
    if (i == dev) {
      offer[i] = cfg.forced.worker_offer->second;
    } else if (c.contains(i)) {
      offer[i] = cfg.profile.omega.at(i);
    } else {
      offer[i] = rs.floor;
    }
  }
  const bool dev_member = dev >= 0 && c.contains(dev);
  const bool dev_screen = dev >= 0 && !dev_member && offer[dev] > rs.floor + kEps;

  // High-type response: the profile's acceptances, the rejection coin, and
  // any forced behavior. A member pooling kills the other screening offers; an
  // outsider screening is taken up to the indifference wage and otherwise
  // takes the whole screening round down with it.
  auto high_accepts = [&](WorkerId i) {
    if (cfg.forced.firm_rejects.contains(i)) return false;
    if (dev_member) {
      if (i == dev) return true;
      return !c.contains(i);
    }
    if (dev_screen) {
      const bool take = offer[dev] <= rs.dev_cut + kEps;
      if (i == dev || c.contains(i)) return take;
      return true;
    }
    if (c.contains(i)) return !coin_reject;
    return offer[i] <= rs.floor + kEps;
  };

  for (WorkerId i = 0; i < n; ++i) {
    const bool low_would = offer[i] <= rs.floor + kEps;
    const bool high_would = high_accepts(i);
    if (low_would && !high_would) ++e.crossing_violations;

    const bool accepted = e.firm_high ? high_would : low_would;
    if (accepted) {
      e.accepted_mask |= 1u << i;
      e.wage1[i] = offer[i];
      e.round1[i] = 1;
    } else {
      e.wage1[i] = rs.alternating ? params.delta * rs.rw.w_low : params.s_low;
      e.round1[i] = 2;
    }
  }

  // Realized wage observations, one independent draw per ordered pair.
  std::vector<std::uint32_t> sees(n, 0);
  for (WorkerId i = 0; i < n; ++i) {
    for (WorkerId j = 0; j < n; ++j) {
      if (i == j) continue;
      const double rho = m.at(i, j);
      if (rho <= 0.0) continue;
      if (uniform_draw(cfg.seed, trial, kSiteObsEdge,
                       static_cast<std::uint64_t>(i) * n + j) < rho) {
        e.edges.emplace_back(i, j);
        sees[i] |= 1u << j;
      }
    }
  }

  // Period-2 beliefs. A worker whose own screening offer was decided learns
  // from the decision; everyone else reads observed wages: above the pooling
  // level reveals the high type, a screener settled at the floor marks a
  // rejection. A member forced into pooling treats the round as uninformative
  // since the shutdown it triggers happens under either type.
  auto belief = [&](WorkerId i) {
    if (offer[i] > rs.floor + kEps) {
      return (e.accepted_mask >> i) & 1u ? 1.0 : rs.q_rej;
    }
    if (i == dev && dev_member) return params.p;
    bool saw_high = false, saw_settled = false;
    for (WorkerId j = 0; j < n; ++j) {
      if (!((sees[i] >> j) & 1u)) continue;
      if (e.wage1[j] > rs.floor + kEps) {
        saw_high = true;
      } else if (offer[j] > rs.floor + kEps) {
        saw_settled = true;
      }
    }
    if (saw_high) return 1.0;
    if (saw_settled) return rs.q_rej;
    return params.p;
  };

  std::vector<bool> proposed_high(n, false);
  for (WorkerId i = 0; i < n; ++i) {
    const double q = belief(i);
    const P2Outcome o = rs.alternating
                            ? play_p2_alt(q, e.firm_high, rs, params)
                            : play_p2_simple(q, e.firm_high, partition.reluctant.contains(i),
                                             params, partition);
    e.wage2[i] = o.wage;
    e.round2[i] = o.round;
    proposed_high[i] = o.proposed_high;
  }

  // Lawsuits need a rejected in-range protected offer and an observed accepted
  // unprotected wage above the floor, so they can only fire on the high type.
  if (cfg.discrimination && e.firm_high) {
    const DiscriminationConfig& dc = *cfg.discrimination;
    for (WorkerId i = 0; i < n; ++i) {
      if (!dc.protected_set.contains(i)) continue;
      if ((e.accepted_mask >> i) & 1u) continue;
      if (offer[i] <= params.s_low + kEps || offer[i] > params.s_high + kEps) continue;
      for (WorkerId j = 0; j < n; ++j) {
        if (j == i || dc.protected_set.contains(j)) continue;
        if (!((e.accepted_mask >> j) & 1u)) continue;
        if (e.wage1[j] <= params.s_low + kEps) continue;
        if (dc.narrow_comparator && e.wage1[j] < offer[i] - kEps) continue;
        if ((sees[i] >> j) & 1u) {
          e.lawsuit_mask |= 1u << i;
          break;
        }
      }
    }
  }

  for (WorkerId i = 0; i < n; ++i) {
    const double v1 = (e.round1[i] == 1 ? 1.0 : params.delta) * e.wage1[i];
    const double v2 = (e.round2[i] == 1 ? 1.0 : params.delta) * e.wage2[i];
    double val = v1 + rs.beta_w * v2;
    if (cfg.discrimination) {
      const DiscriminationConfig& dc = *cfg.discrimination;
      if ((e.lawsuit_mask >> i) & 1u) val += dc.alpha * dc.ell;
      if (dc.mode == DiscMode::Perception && dc.protected_set.contains(i)) {
        if (offer[i] > params.s_low + kEps) val -= dc.c;
        if (proposed_high[i]) val -= rs.beta_w * dc.c;
      }
    }
    e.worker_value[i] = val;
  }

  const double s_firm = e.firm_high ? params.s_high : params.s_low;
  double firm = 0.0;
  for (WorkerId i = 0; i < n; ++i) {
    firm += (e.round1[i] == 1 ? 1.0 : params.delta) * (s_firm - e.wage1[i]);
    firm += params.beta * (e.round2[i] == 1 ? 1.0 : params.delta) * (s_firm - e.wage2[i]);
  }
  if (cfg.discrimination) {
    const DiscriminationConfig& dc = *cfg.discrimination;
    firm -= dc.ell * __builtin_popcount(e.lawsuit_mask);
    if (dc.mode == DiscMode::TasteBased && e.firm_high) {
      firm -= dc.c * (1.0 + params.beta) * dc.protected_set.size();
    }
  }
  e.firm_value = firm;
  return e;
}

// Closed-form counterparts for each report row. Forced runs blank everything
// the deviation touches; the low firm's row survives because the low type's
// take is the same under every supported deviation.
void fill_analytics(const SimConfig& cfg, const Resolved& rs, const ModelParams& params,
                    const SharingMatrix& m, const WorkerPartition& partition,
                    std::vector<double>& aw, double& ah, double& al) {
  const int n = params.n_workers;
  const WorkerSet c = cfg.profile.c;
  const WageProfile& omega = cfg.profile.omega;
  const double lo = params.s_low, hi = params.s_high, p = params.p;

  al = rs.alternating ? (1.0 + params.beta) * n * (lo - rs.rw.w_low) : 0.0;
  aw.assign(n, kNaN);
  ah = kNaN;

  if (cfg.forced.active()) {
    if (cfg.forced.worker_offer) {
      const auto& [id, wage] = *cfg.forced.worker_offer;
      if (c.contains(id)) {
        if (rs.alternating) {
          aw[id] = worker_values_alt(id, c, omega, params, m).screen_to_pool_deviation;
        } else if (cfg.discrimination) {
          aw[id] = worker_values_disc(id, c, omega, params, m, *cfg.discrimination, &partition)
                       .screen_to_pool_deviation;
        } else {
          aw[id] = worker_values(id, c, omega, params, m, &partition).screen_to_pool_deviation;
        }
      } else if (wage > rs.floor + kEps && wage <= rs.dev_cut + kEps) {
        if (rs.alternating) {
          aw[id] = p * (wage + rs.rw.w_high) +
                   (1.0 - p) * (params.delta * params.delta * rs.rw.w_low + rs.rw.w_low);
        } else {
          aw[id] = p * (wage + params.beta * hi) +
                   (1.0 - p) * (params.delta * lo + params.beta * lo);
          if (cfg.discrimination && cfg.discrimination->mode == DiscMode::Perception &&
              cfg.discrimination->protected_set.contains(id)) {
            aw[id] -= cfg.discrimination->c * (1.0 + p * params.beta);
          }
        }
      }
    }
    return;
  }

  if (rs.alternating) {
    for (WorkerId i = 0; i < n; ++i) {
      const AltWorkerValues v = worker_values_alt(i, c, omega, params, m);
      aw[i] = c.contains(i) ? v.screen_value : v.pool_value;
    }
    ah = firm_payoff_alt(c, c, omega, params, m);
    return;
  }

  if (cfg.discrimination) {
    for (WorkerId i = 0; i < n; ++i) {
      const WorkerValues v =
          worker_values_disc(i, c, omega, params, m, *cfg.discrimination, &partition);
      aw[i] = c.contains(i) ? v.screen_value : v.pool_value;
    }
    ah = firm_payoff_disc(c, c, omega, params, m, *cfg.discrimination, &partition);
    return;
  }

  if (rs.sigma == 0.0) {
    for (WorkerId i = 0; i < n; ++i) {
      const WorkerValues v = worker_values(i, c, omega, params, m, &partition);
      aw[i] = c.contains(i) ? v.screen_value : v.pool_value;
    }
    ah = firm_payoff(c, c, omega, params, m, &partition);
    return;
  }

  // Randomizing firm: members weigh the acceptance branch against the delayed
  // settlement plus re-screening at the rejection posterior; outsiders and the
  // firm's own branches follow the same belief updates the episodes use.
  const P2Receipts rej = p2_worker_receipts(rs.q_rej, params);
  for (WorkerId i = 0; i < n; ++i) {
    if (c.contains(i)) {
      aw[i] = p * ((1.0 - rs.sigma) * (omega.at(i) + params.beta * hi) +
                   rs.sigma * (params.delta * lo + params.beta * rej.v_high)) +
              (1.0 - p) * (params.delta * lo + params.beta * rej.v_low);
    } else {
      aw[i] = mixed_pooler_payoff(i, c, rs.sigma, params, m, &partition);
    }
  }

  const double gap = hi - lo;
  auto firm_p2 = [&](double q, bool reluctant) {
    if (!screens_at(q, reluctant, params, partition)) return gap;
    return q >= 1.0 - kEps ? 0.0 : params.delta * gap;
  };
  double reject = 0.0;
  for (WorkerId i = 0; i < n; ++i) {
    if (c.contains(i)) {
      reject += params.delta * gap + params.beta * firm_p2(rs.q_rej, false);
    } else {
      const bool rel = partition.reluctant.contains(i);
      const double pc = observe_prob(i, c, m);
      reject += gap + params.beta * (pc * firm_p2(rs.q_rej, rel) + (1.0 - pc) * firm_p2(p, rel));
    }
  }
  ah = (1.0 - rs.sigma) * firm_payoff(c, c, omega, params, m, &partition) + rs.sigma * reject;
}

}  // namespace

EpisodeRecord simulate_episode(const SimConfig& cfg, const ModelParams& params,
                               const SharingMatrix& m, const WorkerPartition& partition,
                               std::uint64_t trial) {
  const Resolved rs = resolve(cfg, params, m, partition);
  return run_episode(cfg, rs, params, m, partition, trial);
}

SimReport estimate(const SimConfig& cfg, const ModelParams& params, const SharingMatrix& m,
                   const WorkerPartition& partition, std::ostream* episodes) {
  const Resolved rs = resolve(cfg, params, m, partition);
  const int n = params.n_workers;

  std::vector<PairwiseSum> sum(n + 2), sumsq(n + 2);
  std::vector<std::uint64_t> count(n + 2, 0);

  SimReport rep;
  rep.trials = cfg.trials;
  rep.lawsuits_by_worker.assign(n, 0);
  if (!cfg.profile_verified) {
    rep.warning = "UnverifiedProfile: estimates reference a profile that did not pass verification";
  }
  if (episodes) *episodes << episode_csv_header(n) << '\n';

  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    const EpisodeRecord e = run_episode(cfg, rs, params, m, partition, t);
    for (WorkerId i = 0; i < n; ++i) {
      sum[i].add(e.worker_value[i]);
      sumsq[i].add(e.worker_value[i] * e.worker_value[i]);
      ++count[i];
      if ((e.lawsuit_mask >> i) & 1u) {
        ++rep.lawsuits_by_worker[i];
        ++rep.lawsuit_count;
      }
    }
    const int firm_row = e.firm_high ? n : n + 1;
    sum[firm_row].add(e.firm_value);
    sumsq[firm_row].add(e.firm_value * e.firm_value);
    ++count[firm_row];
    rep.single_crossing_violations += e.crossing_violations;
    if (episodes) *episodes << episode_csv_row(e) << '\n';
  }

  std::vector<double> aw;
  double ah = 0.0, al = 0.0;
  fill_analytics(cfg, rs, params, m, partition, aw, ah, al);

  rep.rows.resize(n + 2);
  for (int r = 0; r < n + 2; ++r) {
    AgentRow& row = rep.rows[r];
    row.label = r < n ? "worker_" + std::to_string(r) : (r == n ? "firm_high" : "firm_low");
    row.count = count[r];
    row.analytic = r < n ? aw[r] : (r == n ? ah : al);
    if (count[r] == 0) {
      row.mean = kNaN;
      row.se = kNaN;
      row.z = kNaN;
      continue;
    }
    row.mean = sum[r].total() / static_cast<double>(count[r]);
    double var = 0.0;
    if (count[r] > 1) {
      var = (sumsq[r].total() - static_cast<double>(count[r]) * row.mean * row.mean) /
            static_cast<double>(count[r] - 1);
      if (var < 0.0) var = 0.0;
    }
    row.se = std::sqrt(var / static_cast<double>(count[r]));
    if (std::isnan(row.analytic)) {
      row.z = kNaN;
    } else if (row.se > 0.0) {
      row.z = (row.mean - row.analytic) / row.se;
    } else {
      const double tol = 1e-9 * std::max(1.0, std::fabs(row.analytic));
      row.z = std::fabs(row.mean - row.analytic) <= tol
                  ? 0.0
                  : std::numeric_limits<double>::infinity();
    }
  }
  return rep;
}

std::string episode_csv_header(int n_workers) {
  std::string h = "trial,firm_high,accept_mask,edges,lawsuit_mask,firm_value";
  for (int i = 0; i < n_workers; ++i) {
    const std::string s = std::to_string(i);
    h += ",wage1_" + s + ",round1_" + s + ",wage2_" + s + ",round2_" + s + ",value_" + s;
  }
  return h;
}

std::string episode_csv_row(const EpisodeRecord& e) {
  std::string edges;
  for (std::size_t k = 0; k < e.edges.size(); ++k) {
    if (k) edges += ';';
    edges += std::to_string(e.edges[k].first) + ">" + std::to_string(e.edges[k].second);
  }
  std::vector<std::string> cells = {std::to_string(e.trial),
                                    e.firm_high ? "1" : "0",
                                    std::to_string(e.accepted_mask),
                                    edges,
                                    std::to_string(e.lawsuit_mask),
                                    csv_num(e.firm_value)};
  for (std::size_t i = 0; i < e.wage1.size(); ++i) {
    cells.push_back(csv_num(e.wage1[i]));
    cells.push_back(std::to_string(e.round1[i]));
    cells.push_back(csv_num(e.wage2[i]));
    cells.push_back(std::to_string(e.round2[i]));
    cells.push_back(csv_num(e.worker_value[i]));
  }
  return csv_join(cells);
}

std::string SimReport::to_csv() const {
  std::string out = "agent,count,mean,se,analytic,z\n";
  for (const AgentRow& r : rows) {
    out += csv_join({r.label, std::to_string(r.count), csv_num(r.mean), csv_num(r.se),
                     csv_num(r.analytic), csv_num(r.z)}) +
           "\n";
  }
  return out;
}

std::string SimReport::to_string() const {
  std::ostringstream out;
  out << "trials: " << trials << "\n";
  if (!warning.empty()) out << "warning: " << warning << "\n";
  for (const AgentRow& r : rows) {
    out << r.label << ": mean=" << csv_num(r.mean) << " se=" << csv_num(r.se)
        << " analytic=" << csv_num(r.analytic) << " z=" << csv_num(r.z) << "\n";
  }
  out << "lawsuits: " << lawsuit_count << "\n";
  out << "single_crossing_violations: " << single_crossing_violations << "\n";
  return out.str();
}

}  // namespace screening
