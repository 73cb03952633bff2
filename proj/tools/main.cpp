#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "screening/alt_offers.hpp"
#include "screening/config.hpp"
#include "screening/csv.hpp"
#include "screening/discrimination.hpp"
#include "screening/observability.hpp"
#include "screening/payoff.hpp"
#include "screening/sim.hpp"
#include "screening/solver.hpp"

namespace {

using namespace screening;

WorkerSet parse_worker_set(const std::string& csv) {
  WorkerSet s;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    std::size_t e = item.find_last_not_of(" \t");
    const std::string tok = item.substr(b, e - b + 1);
    char* end = nullptr;
    const long id = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0' || id < 0 || id >= WorkerSet::kMaxWorkers) {
      fail(Errc::parse_error, "bad worker id '" + tok + "' in set argument");
    }
    s = s.with(static_cast<WorkerId>(id));
  }
  return s;
}

EquilibriumCandidate make_candidate(const WorkerSet& c, double wage, double sigma) {
  if (!c.empty() && !(wage > 0.0)) {
    fail(Errc::config_invalid, "a nonempty screening set needs --wage > 0");
  }
  EquilibriumCandidate cand;
  cand.c = c;
  cand.omega = WageProfile::uniform(c, wage);
  cand.sigma = sigma;
  return cand;
}

VerificationReport verify_routed(const RunConfig& rc, const EquilibriumCandidate& cand) {
  if (rc.params.variant == Variant::AlternatingOffers) {
    if (rc.discrimination) {
      fail(Errc::config_invalid, "penalty blocks need game = simple");
    }
    return verify_equilibrium_alt(cand, rc.params, rc.matrix);
  }
  if (rc.discrimination) {
    return verify_equilibrium_disc(cand, rc.params, rc.matrix, rc.partition, *rc.discrimination);
  }
  return verify_equilibrium(cand, rc.params, rc.matrix, rc.partition);
}

std::vector<EquilibriumCandidate> solve_routed(const RunConfig& rc) {
  if (rc.params.variant == Variant::AlternatingOffers) {
    if (rc.discrimination) {
      fail(Errc::config_invalid, "penalty blocks need game = simple");
    }
    return find_symmetric_equilibria_alt(rc.params, rc.matrix);
  }
  if (rc.discrimination) {
    return find_symmetric_equilibria_disc(rc.params, rc.matrix, rc.partition, *rc.discrimination);
  }
  return find_symmetric_equilibria(rc.params, rc.matrix, rc.partition);
}

int with_out(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(std::cout);
    return 0;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(Errc::config_invalid, "cannot open output file '" + path + "'");
  body(f);
  return 0;
}

int run_verify(const std::string& config_path, const std::string& set_csv, double wage) {
  const RunConfig rc = load_config(config_path);
  const EquilibriumCandidate cand = make_candidate(parse_worker_set(set_csv), wage, 0.0);
  const VerificationReport rep = verify_routed(rc, cand);
  std::cout << rep.to_string();
  return rep.verdict ? 0 : 1;
}

int run_solve(const std::string& config_path, bool require_eq, const std::string& out_path) {
  const RunConfig rc = load_config(config_path);
  const std::vector<EquilibriumCandidate> eqs = solve_routed(rc);

  std::optional<MixedSolution> mixed;
  if (rc.params.variant == Variant::Simple && !rc.discrimination) {
    try {
      mixed = solve_mixed(rc.params, rc.matrix, rc.partition.screeners);
    } catch (const ModelError& err) {
      if (err.code() != Errc::belief_too_low && err.code() != Errc::empty_set) throw;
    }
  }

  bool has_screening = false;
  with_out(out_path, [&](std::ostream& out) {
    out << "size,per_worker_wage,sigma\n";
    for (const EquilibriumCandidate& eq : eqs) {
      const double wage = eq.c.empty() ? 0.0 : eq.omega.at(eq.c.ids().front());
      if (!eq.c.empty()) has_screening = true;
      out << csv_join({std::to_string(eq.c.size()), csv_num(wage), csv_num(eq.sigma)}) << "\n";
    }
    if (mixed) {
      const WorkerSet& c = mixed->candidate.c;
      out << csv_join({std::to_string(c.size()), csv_num(mixed->candidate.omega.at(c.ids().front())),
                       csv_num(mixed->candidate.sigma)})
          << "\n";
    }
  });
  std::cerr << "pure candidates verified: " << eqs.size()
            << (mixed ? " (plus the randomized-rejection construction)" : "") << "\n";
  return require_eq && !has_screening ? 1 : 0;
}

int run_sweep(const std::string& config_path, const std::string& param, double from, double to,
              int steps, const std::string& out_path) {
  const RunConfig base = load_config(config_path);
  if (steps < 1) fail(Errc::config_invalid, "--steps must be at least 1");
  if (param != "rho" && param != "ell" && param != "beta" && param != "delta" && param != "p") {
    fail(Errc::config_invalid, "--param must be one of rho, ell, beta, delta, p");
  }
  if (param == "ell" && !base.discrimination) {
    fail(Errc::config_invalid, "sweeping ell needs a penalty block in the config");
  }

  return with_out(out_path, [&](std::ostream& out) {
    out << "param_value,n_threshold,eq_size,per_worker_wage,pooler_observability,"
           "screening_collapsed\n";
    for (int k = 0; k < steps; ++k) {
      const double v = steps == 1 ? from : from + (to - from) * k / (steps - 1);
      RunConfig rc = base;
      if (param == "rho") {
        rc.matrix = SharingMatrix::symmetric(rc.params.n_workers, v);
      } else if (param == "ell") {
        rc.discrimination->ell = v;
        rc.discrimination->validate(rc.params);
      } else {
        if (param == "beta") rc.params.beta = v;
        if (param == "delta") rc.params.delta = v;
        if (param == "p") rc.params.p = v;
        rc.params.validate();
      }

      int threshold = 0;
      if (rc.params.variant == Variant::Simple) {
        threshold = screening_threshold(rc.params, rc.matrix, rc.partition).n_value;
      }
      const std::vector<EquilibriumCandidate> eqs = solve_routed(rc);
      const EquilibriumCandidate* best = nullptr;
      for (const EquilibriumCandidate& eq : eqs) {
        if (eq.c.empty()) continue;
        if (!best || eq.c.size() > best->c.size()) best = &eq;
      }
      const int eq_size = best ? best->c.size() : 0;
      const double wage = best ? best->omega.at(best->c.ids().front()) : 0.0;
      const double pobs = best ? expected_observers(best->c, rc.matrix) / best->c.size() : 0.0;
      out << csv_join({csv_num(v), std::to_string(threshold), std::to_string(eq_size),
                       csv_num(wage), csv_num(pobs), best ? "0" : "1"})
          << "\n";
    }
  });
}

int run_simulate(const std::string& config_path, const std::string& set_csv, double wage,
                 double sigma, std::uint64_t trials, std::uint64_t seed,
                 const std::string& episodes_path, bool require_eq,
                 const std::string& force_reject_csv, const std::string& force_offer,
                 const std::string& out_path) {
  const RunConfig rc = load_config(config_path);

  SimConfig sc;
  sc.trials = trials;
  sc.seed = seed;
  sc.profile = make_candidate(parse_worker_set(set_csv), wage, sigma);
  sc.discrimination = rc.discrimination;
  if (!force_reject_csv.empty()) sc.forced.firm_rejects = parse_worker_set(force_reject_csv);
  if (!force_offer.empty()) {
    const std::size_t colon = force_offer.find(':');
    if (colon == std::string::npos) {
      fail(Errc::parse_error, "--force-offer expects id:wage, got '" + force_offer + "'");
    }
    const WorkerSet who = parse_worker_set(force_offer.substr(0, colon));
    if (who.size() != 1) fail(Errc::parse_error, "--force-offer names exactly one worker");
    char* end = nullptr;
    const std::string wtext = force_offer.substr(colon + 1);
    const double w = std::strtod(wtext.c_str(), &end);
    if (end == wtext.c_str() || *end != '\0') {
      fail(Errc::parse_error, "--force-offer expects id:wage, got '" + force_offer + "'");
    }
    sc.forced.worker_offer = {who.ids().front(), w};
  }

  // Verification status feeds the report's warning channel: pure profiles run
  // the full verifier, randomized ones are checked against the constructed
  // indifference wage and rejection probability.
  bool verified = false;
  if (sigma == 0.0) {
    verified = verify_routed(rc, sc.profile).verdict;
  } else if (rc.params.variant == Variant::Simple && !rc.discrimination &&
             !sc.profile.c.empty()) {
    try {
      const MixedSolution ms = solve_mixed(rc.params, rc.matrix, sc.profile.c);
      const double w0 = ms.candidate.omega.at(sc.profile.c.ids().front());
      verified = std::fabs(w0 - wage) <= 1e-6 && std::fabs(ms.candidate.sigma - sigma) <= 1e-6;
    } catch (const ModelError&) {
      verified = false;
    }
  }
  sc.profile_verified = verified;
  if (require_eq && !verified) {
    std::cerr << "profile failed verification and --require-equilibrium is set\n";
    return 1;
  }

  std::optional<std::ofstream> episode_file;
  std::ostream* episodes = nullptr;
  if (!episodes_path.empty()) {
    episode_file.emplace(episodes_path, std::ios::binary);
    if (!*episode_file) {
      fail(Errc::config_invalid, "cannot open episode file '" + episodes_path + "'");
    }
    episodes = &*episode_file;
  }

  const SimReport rep = estimate(sc, rc.params, rc.matrix, rc.partition, episodes);
  with_out(out_path, [&](std::ostream& out) { out << rep.to_csv(); });
  std::cerr << rep.to_string();
  return 0;
}

// Deterministic parameter draws for the property suites, all keyed off the
// explicit seed so reruns are identical.
double prop_draw(std::uint64_t seed, std::uint64_t t, std::uint64_t site, std::uint64_t lane) {
  return uniform_draw(seed, t, 1000 + site, lane);
}

SharingMatrix random_matrix(int n, std::uint64_t seed, std::uint64_t t) {
  SharingMatrix m(n);
  for (WorkerId i = 0; i < n; ++i) {
    for (WorkerId j = i + 1; j < n; ++j) {
      const std::uint64_t lane = static_cast<std::uint64_t>(i) * n + j;
      double rho = prop_draw(seed, t, 0, lane);
      if (prop_draw(seed, t, 1, lane) < 0.25) rho = 0.0;  // keep zero edges in play
      m.set(i, j, rho);
      m.set(j, i, rho);
    }
  }
  return m;
}

ModelParams random_params(const ModelParams& base, std::uint64_t seed, std::uint64_t t) {
  ModelParams p = base;
  p.s_high = p.s_low * (1.5 + 1.5 * prop_draw(seed, t, 2, 0));
  p.p = 0.1 + 0.8 * prop_draw(seed, t, 2, 1);
  p.beta = 0.1 + 0.85 * prop_draw(seed, t, 2, 2);
  p.delta = 0.1 + 0.8 * prop_draw(seed, t, 2, 3);
  const double d_floor = p.p * p.s_high - p.s_low + 0.05;
  if (p.d < d_floor) p.d = d_floor;
  p.validate();
  return p;
}

int run_checkprops(const std::string& config_path, int draws, std::uint64_t seed) {
  const RunConfig rc = load_config(config_path);
  const int n = rc.params.n_workers;
  bool all_pass = true;
  auto report = [&](const std::string& name, long violations, long checked) {
    const bool pass = violations == 0;
    all_pass = all_pass && pass;
    std::cout << (pass ? "PASS" : "FAIL") << " " << name << " checks=" << checked
              << " violations=" << violations << "\n";
  };

  // Exhaustive subset enumeration caps the universe; larger workforces are
  // spot-checked on their first 17 members.
  const int sub_n = std::min(n, 17);
  long sub_viol = 0, sub_checked = 0;
  for (int t = 0; t < draws; ++t) {
    const SharingMatrix m = random_matrix(n, seed, static_cast<std::uint64_t>(t));
    for (WorkerId j = 0; j < sub_n; ++j) {
      const SubmodularityReport r = submodularity_report(m, j, WorkerSet::all(sub_n).without(j));
      ++sub_checked;
      if (!r.ok()) ++sub_viol;
    }
  }
  report("observation_submodularity", sub_viol, sub_checked);

  const WorkerSet cset = WorkerSet::all(std::min(n, 6));
  long sup_viol = 0, sup_checked = 0;
  long ind_viol = 0, ind_checked = 0;
  for (int t = 0; t < draws; ++t) {
    const ModelParams pp = random_params(rc.params, seed, static_cast<std::uint64_t>(t));
    const SharingMatrix m = random_matrix(n, seed, static_cast<std::uint64_t>(t) + 7777);

    const double unit = std::max(0.01, wbar(cset, pp, m) / cset.size());
    const WageProfile w = WageProfile::uniform(cset, unit);
    const SupermodularityReport sr = supermodularity_report(cset, w, pp, m);
    ++sup_checked;
    if (!sr.ok()) ++sup_viol;

    const WorkerSet full = WorkerSet::all(n);
    const double wage = wbar(full, pp, m) / n;
    if (wage > 0.0) {
      const WageProfile wf = WageProfile::uniform(full, wage);
      ++ind_checked;
      const double gap =
          firm_payoff(full, full, wf, pp, m) - firm_payoff(WorkerSet{}, full, wf, pp, m);
      bool bad = std::fabs(gap) > 1e-8;
      if (n <= 8) {
        const double pi_c = firm_payoff(full, full, wf, pp, m);
        for_each_subset(full.mask(), [&](std::uint32_t a) {
          if (firm_payoff(WorkerSet::from_mask(a), full, wf, pp, m) > pi_c + 1e-9) bad = true;
        });
      }
      if (bad) ++ind_viol;
    }
  }
  report("acceptance_supermodularity", sup_viol, sup_checked);
  report("uniform_wage_indifference", ind_viol, ind_checked);

  long mono_viol = 0, mono_checked = 0;
  for (int t = 0; t < draws; ++t) {
    const double rho = 0.01 + 0.98 * prop_draw(seed, static_cast<std::uint64_t>(t), 3, 0);
    ++mono_checked;
    if (!pbar_ratio_series(rho, n).strictly_decreasing) ++mono_viol;

    const ModelParams pp = random_params(rc.params, seed, static_cast<std::uint64_t>(t));
    const SharingMatrix m = SharingMatrix::symmetric(n, rho);
    double prev = -1e300;
    for (int k = 1; k <= n; ++k) {
      const double per = wbar(WorkerSet::all(k), pp, m) / k;
      if (per <= prev + kEps) {
        ++mono_viol;
        break;
      }
      prev = per;
    }
  }
  report("wage_observability_monotonicity", mono_viol, mono_checked);

  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-period multi-worker screening model toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, set_csv, param, episodes_path, force_reject, force_offer;
  double wage = 0.0, sigma = 0.0, from = 0.0, to = 0.0;
  int steps = 1, draws = 100;
  std::uint64_t trials = 1000, seed = 0;
  bool require_eq = false;

  CLI::App* verify = app.add_subcommand("verify", "check one candidate profile");
  verify->add_option("--config", config_path, "model config file")->required();
  verify->add_option("--set", set_csv, "comma-separated screener ids; empty for no screening");
  verify->add_option("--wage", wage, "uniform screening offer");

  CLI::App* solve = app.add_subcommand("solve", "list symmetric equilibria");
  solve->add_option("--config", config_path)->required();
  solve->add_option("--out", out_path, "CSV destination (default stdout)");
  solve->add_flag("--require-equilibrium", require_eq,
                  "exit 1 unless a screening equilibrium exists");

  CLI::App* sweep = app.add_subcommand("sweep", "grid over one parameter");
  sweep->add_option("--config", config_path)->required();
  sweep->add_option("--param", param, "rho, ell, beta, delta, or p")->required();
  sweep->add_option("--from", from)->required();
  sweep->add_option("--to", to)->required();
  sweep->add_option("--steps", steps)->required();
  sweep->add_option("--out", out_path, "CSV destination (default stdout)");

  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo check of a profile");
  sim->add_option("--config", config_path)->required();
  sim->add_option("--set", set_csv, "screener ids for the profile");
  sim->add_option("--wage", wage, "uniform screening offer");
  sim->add_option("--sigma", sigma, "firm rejection probability");
  sim->add_option("--trials", trials)->required();
  sim->add_option("--seed", seed, "explicit seed; reruns are bit-identical")->required();
  sim->add_option("--episodes", episodes_path, "stream per-episode CSV here");
  sim->add_option("--force-reject", force_reject, "worker ids the high firm must reject");
  sim->add_option("--force-offer", force_offer, "id:wage forced period-1 offer");
  sim->add_option("--out", out_path, "CSV destination (default stdout)");
  sim->add_flag("--require-equilibrium", require_eq, "exit 1 if the profile fails verification");

  CLI::App* props = app.add_subcommand("checkprops", "randomized property suites");
  props->add_option("--config", config_path)->required();
  props->add_option("--draws", draws, "draws per suite");
  props->add_option("--seed", seed, "explicit seed")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return run_verify(config_path, set_csv, wage);
    if (solve->parsed()) return run_solve(config_path, require_eq, out_path);
    if (sweep->parsed()) return run_sweep(config_path, param, from, to, steps, out_path);
    if (sim->parsed()) {
      return run_simulate(config_path, set_csv, wage, sigma, trials, seed, episodes_path,
                          require_eq, force_reject, force_offer, out_path);
    }
    if (props->parsed()) return run_checkprops(config_path, draws, seed);
  } catch (const ModelError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 2;
}
