#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "screening/discrimination.hpp"
#include "test_util.hpp"

using namespace screening;
using screening::test::code_of;
using screening::test::p0;

namespace {

const ModelParams kP0 = p0();
const SharingMatrix kM = SharingMatrix::symmetric(4, 0.2);

DiscriminationConfig perception_cfg() {
  DiscriminationConfig cfg;
  cfg.protected_set = WorkerSet{3};
  cfg.ell = 1.0;
  cfg.alpha = 0.5;
  cfg.c = 0.05;
  cfg.mode = DiscMode::Perception;
  return cfg;
}

}  // namespace

TEST_CASE("penalty configuration validation") {
  DiscriminationConfig cfg = perception_cfg();
  CHECK_NOTHROW(cfg.validate(kP0));

  SUBCASE("protected workers must exist in the economy") {
    cfg.protected_set = WorkerSet{7};
    CHECK(code_of([&] { cfg.validate(kP0); }) == Errc::config_invalid);
  }
  SUBCASE("damages cannot be negative") {
    cfg.ell = -0.5;
    CHECK(code_of([&] { cfg.validate(kP0); }) == Errc::config_invalid);
  }
  SUBCASE("worker share of damages lives in [0,1]") {
    cfg.alpha = 1.5;
    CHECK(code_of([&] { cfg.validate(kP0); }) == Errc::config_invalid);
  }
  SUBCASE("friction cost cannot be negative") {
    cfg.c = -0.01;
    CHECK(code_of([&] { cfg.validate(kP0); }) == Errc::config_invalid);
  }
  SUBCASE("friction cost cannot erase the output gap") {
    cfg.c = 1.2;
    CHECK(code_of([&] { cfg.validate(kP0); }) == Errc::config_invalid);
  }
}

TEST_CASE("claim probability counts accepted unprotected comparators") {
  const DiscriminationConfig cfg = perception_cfg();
  const WorkerSet c = WorkerSet::all(4);
  const WageProfile w = WageProfile::uniform(c, 1.1);
  const WorkerSet a{0, 1, 2};

  CHECK(lawsuit_prob(3, a, c, w, kM, kP0, cfg) == doctest::Approx(0.488).epsilon(1e-9));

  SUBCASE("narrow comparator mode requires at least the rejected offer") {
    DiscriminationConfig narrow = cfg;
    narrow.narrow_comparator = true;
    CHECK(lawsuit_prob(3, a, c, w, kM, kP0, narrow) == doctest::Approx(0.488).epsilon(1e-9));

    // Raise the rejected offer above everyone else's wage: no comparator left,
    // so the claim probability collapses to zero.
    WageProfile bumped;
    for (WorkerId i : c.ids()) bumped.offers[i] = i == 3 ? 1.3 : 1.1;
    CHECK(lawsuit_prob(3, a, c, bumped, kM, kP0, narrow) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("only rejected protected workers can claim") {
    CHECK(code_of([&] { lawsuit_prob(3, c, c, w, kM, kP0, cfg); }) == Errc::not_rejected);
    CHECK(code_of([&] { lawsuit_prob(0, a, c, w, kM, kP0, cfg); }) == Errc::domain_error);
  }
  SUBCASE("offers outside the claim range cannot anchor a claim") {
    WageProfile out;
    for (WorkerId i : c.ids()) out.offers[i] = i == 3 ? 2.5 : 1.1;
    CHECK(code_of([&] { lawsuit_prob(3, a, c, out, kM, kP0, cfg); }) ==
          Errc::offer_out_of_range);
  }
}

TEST_CASE("penalty firm payoff matches the base payoff on path") {
  const DiscriminationConfig cfg = perception_cfg();
  const WorkerSet c = WorkerSet::all(4);
  const WageProfile w = WageProfile::uniform(c, 1.1);

  // Accept-all leaves no rejected protected worker; Perception costs land on
  // workers, so the firm side is untouched.
  CHECK(firm_payoff_disc(c, c, w, kP0, kM, cfg) ==
        doctest::Approx(firm_payoff(c, c, w, kP0, kM)).epsilon(1e-12));

  // Rejecting worker 3 now carries expected damages ell * 0.488.
  const WorkerSet a{0, 1, 2};
  CHECK(firm_payoff_disc(a, c, w, kP0, kM, cfg) ==
        doctest::Approx(firm_payoff(a, c, w, kP0, kM) - 1.0 * 0.488).epsilon(1e-9));

  SUBCASE("taste mode charges employment of protected workers") {
    DiscriminationConfig taste = cfg;
    taste.mode = DiscMode::TasteBased;
    const double both_periods = 0.05 * (1.0 + 0.4);
    CHECK(firm_payoff_disc(c, c, w, kP0, kM, taste) ==
          doctest::Approx(firm_payoff(c, c, w, kP0, kM) - both_periods).epsilon(1e-9));
  }
  SUBCASE("statistical mode lowers protected output to s_high - c") {
    DiscriminationConfig stat = cfg;
    stat.mode = DiscMode::Statistical;
    CHECK(firm_payoff_disc(c, c, w, kP0, kM, stat) <
          firm_payoff(c, c, w, kP0, kM) - 1e-6);
  }
}

TEST_CASE("worker values under the proposal-cost channel") {
  const DiscriminationConfig cfg = perception_cfg();
  const WorkerSet c = WorkerSet::all(4);
  const WageProfile w = WageProfile::uniform(c, 1.1);

  const WorkerValues v = worker_values_disc(3, c, w, kP0, kM, cfg);
  CHECK(v.screen_value == doctest::Approx(1.438).epsilon(1e-9));
  CHECK(v.screen_to_pool_deviation == doctest::Approx(1.42).epsilon(1e-9));

  const WorkerSet inner{0, 1, 2};
  const WageProfile wi = WageProfile::uniform(inner, wbar(inner, kP0, kM) / 3.0);
  const WorkerValues pooled = worker_values_disc(3, inner, wi, kP0, kM, cfg);
  CHECK(pooled.pool_value == doctest::Approx(1.521504).epsilon(1e-9));

  // Unprotected workers keep their base values.
  const WorkerValues base = worker_values(0, c, w, kP0, kM);
  const WorkerValues same = worker_values_disc(0, c, w, kP0, kM, cfg);
  CHECK(same.screen_value == doctest::Approx(base.screen_value).epsilon(1e-12));
  CHECK(same.pool_value == doctest::Approx(base.pool_value).epsilon(1e-12));
}

TEST_CASE("baiting a rejection loses to the damages-backed acceptable offer") {
  DiscriminationConfig cfg = perception_cfg();
  cfg.ell = 2.0;
  cfg.alpha = 1.0;
  cfg.c = 0.0;

  const WorkerSet inner{0, 1, 2};
  const WageProfile wi = WageProfile::uniform(inner, 1.1);
  const EntrapmentReport r = entrapment_value(3, inner, wi, kP0, kM, cfg);
  CHECK(r.entrapment_value == doctest::Approx(1.6232).epsilon(1e-9));
  CHECK(r.acceptable_offer == doctest::Approx(2.1736).epsilon(1e-9));
  CHECK(r.acceptable_offer_value == doctest::Approx(2.14416).epsilon(1e-9));
  CHECK(r.dominated);

  SUBCASE("entrapment needs an unprotected comparator pool") {
    CHECK(code_of([&] { entrapment_value(3, WorkerSet{}, WageProfile{}, kP0, kM, cfg); }) ==
          Errc::no_comparators);
  }
  SUBCASE("members of the screening set cannot run the bait") {
    DiscriminationConfig wide = cfg;
    wide.protected_set = WorkerSet{2, 3};
    CHECK(code_of([&] { entrapment_value(2, inner, wi, kP0, kM, wide); }) ==
          Errc::member_query);
  }
  SUBCASE("only protected workers can run the bait") {
    DiscriminationConfig none = cfg;
    none.protected_set = WorkerSet{2};
    CHECK(code_of([&] { entrapment_value(3, inner, wi, kP0, kM, none); }) ==
          Errc::domain_error);
  }
}

TEST_CASE("indifference wage bill under each penalty mode") {
  const WorkerSet c = WorkerSet::all(4);

  SUBCASE("perception and taste leave the bill unchanged") {
    DiscriminationConfig cfg = perception_cfg();
    CHECK(wbar_disc(c, kP0, kM, cfg).wage_sum == doctest::Approx(4.4).epsilon(1e-8));
    cfg.mode = DiscMode::TasteBased;
    CHECK(wbar_disc(c, kP0, kM, cfg).wage_sum == doctest::Approx(4.4).epsilon(1e-8));
  }
  SUBCASE("statistical bill solves its own indifference equation") {
    DiscriminationConfig cfg = perception_cfg();
    cfg.mode = DiscMode::Statistical;
    const WbarDiscResult r = wbar_disc(c, kP0, kM, cfg);
    const WageProfile w = WageProfile::uniform(c, r.wage_sum / 4.0);
    CHECK(firm_payoff_disc(c, c, w, kP0, kM, cfg) ==
          doctest::Approx(firm_payoff_disc(WorkerSet{}, c, w, kP0, kM, cfg)).epsilon(1e-7));
  }
  SUBCASE("per-worker wage rises with the screening set either way") {
    const DiscriminationConfig cfg = perception_cfg();
    const WbarDiscResult r = wbar_disc(WorkerSet{0, 1, 2}, kP0, kM, cfg);
    CHECK(r.increasing_unprotected);
    CHECK(r.increasing_protected);
  }
}

TEST_CASE("penalty verification of the benchmark candidate") {
  const DiscriminationConfig cfg = perception_cfg();
  const WorkerPartition part = WorkerPartition::all_screeners(4);

  EquilibriumCandidate cand;
  cand.c = WorkerSet::all(4);
  cand.omega = WageProfile::uniform(cand.c, 1.1);

  const VerificationReport r = verify_equilibrium_disc(cand, kP0, kM, part, cfg);
  CHECK(r.verdict);
  // Protected worker 3: screen 1.438 vs pool deviation 1.42.
  CHECK(r.screener_ic[3].slack == doctest::Approx(0.018).epsilon(1e-9));

  // The proposal cost falls harder on the screening deviation than on pooling,
  // so the three-screener candidate that fails without the penalty now holds.
  EquilibriumCandidate segregated;
  segregated.c = WorkerSet{0, 1, 2};
  segregated.omega = WageProfile::uniform(segregated.c, wbar(segregated.c, kP0, kM) / 3.0);
  CHECK_FALSE(verify_equilibrium(segregated, kP0, kM, part).verdict);
  CHECK(verify_equilibrium_disc(segregated, kP0, kM, part, cfg).verdict);

  const std::vector<EquilibriumCandidate> found =
      find_symmetric_equilibria_disc(kP0, kM, part, cfg);
  REQUIRE(found.size() == 3);
  CHECK(found[0].c.empty());
  CHECK(found[1].c == WorkerSet{0, 1, 2});
  CHECK(found[2].c == WorkerSet::all(4));
}

TEST_CASE("damages level does not move equilibrium outcomes") {
  const DiscriminationConfig cfg = perception_cfg();
  const WorkerPartition part = WorkerPartition::all_screeners(4);
  const PenaltyIrrelevanceReport r =
      penalty_irrelevance_check(kP0, kM, part, cfg, {0.0, 0.1, 1.0, 10.0});
  CHECK(r.ell_grid.size() == 4);
  CHECK(r.identical);
  CHECK(r.entrapment_dominated);
  for (const auto& list : r.outcomes) {
    REQUIRE(list.size() == 3);
    CHECK(list[1].size == 3);
    CHECK(list[1].wage == doctest::Approx(3.1048 / 3.0).epsilon(1e-8));
    CHECK(list[2].size == 4);
    CHECK(list[2].wage == doctest::Approx(1.1).epsilon(1e-8));
  }
}

TEST_CASE("low firm's policy toward protected pooling offers") {
  DiscriminationConfig cfg = perception_cfg();
  cfg.mode = DiscMode::TasteBased;
  cfg.ell = 1.0;

  const LowTypePolicyReport r = lowtype_policy(kP0, kM, cfg);
  CHECK(r.detection_prob == doctest::Approx(0.488).epsilon(1e-9));
  CHECK(r.accept_cost == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(r.reject_cost == doctest::Approx(0.488).epsilon(1e-9));
  CHECK(r.accept_protected);  // 0.05 < 0.488
  CHECK(r.ell_threshold == doctest::Approx(0.05 / 0.488).epsilon(1e-6));
  CHECK(r.rho_threshold == doctest::Approx(1.0 - std::pow(0.95, 1.0 / 3.0)).epsilon(1e-6));

  SUBCASE("perception mode accepts for free") {
    const LowTypePolicyReport p = lowtype_policy(kP0, kM, perception_cfg());
    CHECK(p.accept_protected);
    CHECK(p.accept_cost == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("a zero-detection override flips the policy to reject") {
    const DetectionHook zero = [](WorkerId, const ModelParams&, const SharingMatrix&,
                                  const DiscriminationConfig&) { return 0.0; };
    const LowTypePolicyReport z = lowtype_policy(kP0, kM, cfg, zero);
    CHECK_FALSE(z.accept_protected);  // zero damages exposure never beats 0.05
    CHECK(z.detection_prob == doctest::Approx(0.0).epsilon(1e-12));
  }
}
