#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "screening/solver.hpp"
#include "test_util.hpp"

using namespace screening;
using screening::test::code_of;
using screening::test::p0;

namespace {

const ModelParams kP0 = p0();
const SharingMatrix kM = SharingMatrix::symmetric(4, 0.2);

WorkerPartition all_screeners4() { return WorkerPartition::all_screeners(4); }

EquilibriumCandidate full_candidate(double wage) {
  EquilibriumCandidate cand;
  cand.c = WorkerSet::all(4);
  cand.omega = WageProfile::uniform(cand.c, wage);
  return cand;
}

}  // namespace

TEST_CASE("all-screen candidate at the indifference wage verifies") {
  const VerificationReport r =
      verify_equilibrium(full_candidate(1.1), kP0, kM, all_screeners4());
  CHECK(r.verdict);
  CHECK(r.firm_indifference.pass);
  CHECK(r.firm_indifference.slack == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.firm_optimality.pass);
  CHECK(r.lowtype_bound.pass);
  CHECK_FALSE(r.separating_wage.has_value());
  CHECK(r.empty_in_chi.size() == 4);
  CHECK(r.screener_ic.size() == 4);
  CHECK(r.pooler_ic.empty());
  for (const WorkerCheck& w : r.screener_ic) {
    CHECK(w.pass);
    CHECK(w.slack == doctest::Approx(0.06).epsilon(1e-9));  // 1.5 vs 1.44
  }
  const std::string text = r.to_string();
  CHECK(text.find("verdict: PASS") != std::string::npos);
  CHECK(text.find("screener_ic[3]") != std::string::npos);
}

TEST_CASE("three-screener candidate fails on the pooler side") {
  EquilibriumCandidate cand;
  cand.c = WorkerSet{0, 1, 2};
  cand.omega = WageProfile::uniform(cand.c, wbar(cand.c, kP0, kM) / 3.0);

  const VerificationReport r = verify_equilibrium(cand, kP0, kM, all_screeners4());
  CHECK(r.firm_indifference.pass);
  CHECK(r.lowtype_bound.pass);
  REQUIRE(r.pooler_ic.size() == 1);
  CHECK(r.pooler_ic[0].worker == 3);
  CHECK_FALSE(r.pooler_ic[0].pass);
  CHECK_FALSE(r.pooler_ic[0].gated);
  CHECK(r.pooler_ic[0].slack == doctest::Approx(1.5376 - 1.55856).epsilon(1e-6));
  CHECK_FALSE(r.verdict);
  CHECK(r.to_string().find("verdict: FAIL") != std::string::npos);
}

TEST_CASE("no-screening candidate verifies with diagnostics") {
  EquilibriumCandidate empty;
  const VerificationReport r = verify_equilibrium(empty, kP0, kM, all_screeners4());
  CHECK(r.verdict);
  REQUIRE(r.no_screen.has_value());
  CHECK_FALSE(r.no_screen->screening_unprofitable);  // p*s_high > s_low here
  CHECK(r.no_screen->pbar_ratio == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.no_screen->scalar_rho);
  CHECK(r.no_screen->rhs_plain == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r.no_screen->rhs_with_delta == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(r.no_screen->holds_with_delta);
  CHECK(r.no_screen->holds_plain);

  // Every would-be screener is gated: the lone-deviator wage 0.98 sits below
  // the pooling floor, so no profitable unilateral entry exists.
  REQUIRE(r.pooler_ic.size() == 4);
  for (const WorkerCheck& w : r.pooler_ic) {
    CHECK(w.pass);
    CHECK(w.gated);
  }
}

TEST_CASE("rejecting everything is always an available best response") {
  const EquilibriumCandidate cand = full_candidate(1.1);
  for (WorkerId i = 0; i < 4; ++i) {
    const std::vector<WorkerSet> sets = best_response_sets(i, cand, kP0, kM);
    const bool has_empty =
        std::any_of(sets.begin(), sets.end(), [](const WorkerSet& s) { return s.empty(); });
    CHECK(has_empty);
  }
  // A wage bump above indifference makes rejection strictly better, so the
  // remaining-acceptance sets drop out of the argmax.
  const std::vector<WorkerSet> sets = best_response_sets(0, full_candidate(1.2), kP0, kM);
  REQUIRE(sets.size() == 1);
  CHECK(sets[0].empty());
}

TEST_CASE("symmetric enumeration finds exactly the empty and full candidates") {
  const std::vector<EquilibriumCandidate> found =
      find_symmetric_equilibria(kP0, kM, all_screeners4());
  REQUIRE(found.size() == 2);
  CHECK(found[0].c.empty());
  CHECK(found[1].c == WorkerSet::all(4));
  CHECK(found[1].omega.at(0) == doctest::Approx(1.1).epsilon(1e-9));
}

TEST_CASE("screening thresholds over the screener-pool size") {
  SUBCASE("benchmark sharing, no reluctant pool") {
    const ThresholdResult r = screening_threshold(kP0, kM, all_screeners4());
    CHECK(r.n_value == 1);
    CHECK(r.note == ExistenceNote::AlwaysExists);
    CHECK(r.monotone_probes);
  }
  SUBCASE("dense sharing with one reluctant worker needs a large pool") {
    WorkerPartition part;
    part.screeners = WorkerSet{0, 1, 2};
    part.reluctant = WorkerSet{3};
    part.q_reluctant = 0.8;
    const SharingMatrix dense = SharingMatrix::symmetric(4, 0.9);
    const ThresholdResult r = screening_threshold(kP0, dense, part);
    CHECK(r.n_value == 4);
    CHECK(r.note == ExistenceNote::ExistsUnderConditions);
    CHECK(r.monotone_probes);
    CHECK(r.n_rho_probe >= r.n_value);
  }
}

TEST_CASE("mixed candidate solution at the benchmark") {
  const MixedSolution s = solve_mixed(kP0, kM, WorkerSet::all(4));
  CHECK(s.candidate.sigma == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(s.candidate.omega.at(2) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(s.p_star == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.payoff_mixed == doctest::Approx(1.18).epsilon(1e-9));
  CHECK(s.payoff_mixed_sigma_literal == doctest::Approx(1.3133333333).epsilon(1e-9));
  CHECK(s.payoff_pure_same_set == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(s.payoff_no_screen == doctest::Approx(1.44).epsilon(1e-9));
  CHECK_FALSE(s.improves_over_no_screen);

  CHECK(code_of([&] { solve_mixed(kP0, kM, WorkerSet{}); }) == Errc::empty_set);
  ModelParams low = kP0;
  low.p = 0.45;
  CHECK(code_of([&] { solve_mixed(low, kM, WorkerSet::all(4)); }) == Errc::belief_too_low);
}
