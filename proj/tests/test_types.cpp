#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "screening/types.hpp"
#include "test_util.hpp"

using namespace screening;
using screening::test::code_of;
using screening::test::p0;

TEST_CASE("worker sets behave as dense bitmask sets") {
  const WorkerSet w = WorkerSet::all(4);
  CHECK(w.size() == 4);
  CHECK(w.contains(3));
  CHECK_FALSE(w.contains(4));

  const WorkerSet s{0, 1, 3};
  CHECK(s.size() == 3);
  CHECK(s.to_string() == "{0,1,3}");
  CHECK(s.without(1).size() == 2);
  CHECK(s.with(2) == w);
  CHECK(s.subset_of(w));
  CHECK_FALSE(w.subset_of(s));

  CHECK((s & WorkerSet{1, 2}) == WorkerSet{1});
  CHECK((s | WorkerSet{2}) == w);
  CHECK((w - s) == WorkerSet{2});
  CHECK(WorkerSet{}.empty());

  const std::vector<WorkerId> ids = s.ids();
  REQUIRE(ids.size() == 3);
  CHECK(ids[0] == 0);
  CHECK(ids[2] == 3);
}

TEST_CASE("subset enumeration visits every submask once") {
  int count = 0;
  bool saw_empty = false, saw_full = false;
  for_each_subset(WorkerSet{0, 2, 3}.mask(), [&](std::uint32_t sub) {
    ++count;
    if (sub == 0) saw_empty = true;
    if (sub == WorkerSet{0, 2, 3}.mask()) saw_full = true;
  });
  CHECK(count == 8);
  CHECK(saw_empty);
  CHECK(saw_full);
}

TEST_CASE("model parameter validation pins the domain") {
  CHECK_NOTHROW(p0().validate());

  ModelParams bad = p0();
  bad.s_low = 2.5;
  CHECK(code_of([&] { bad.validate(); }) == Errc::validation_error);

  bad = p0();
  bad.p = 1.0;
  CHECK(code_of([&] { bad.validate(); }) == Errc::validation_error);

  bad = p0();
  bad.delta = 0.0;
  CHECK(code_of([&] { bad.validate(); }) == Errc::validation_error);

  // The final-round settlement logic needs s_low > p*s_high - d.
  bad = p0();
  bad.s_high = 3.0;
  bad.d = 0.5;
  CHECK(code_of([&] { bad.validate(); }) == Errc::validation_error);

  bad = p0();
  bad.n_workers = 40;
  CHECK(code_of([&] { bad.validate(); }) == Errc::validation_error);
}

TEST_CASE("sharing matrices stay symmetric-capable and range-checked") {
  SharingMatrix m = SharingMatrix::symmetric(4, 0.2);
  CHECK(m.n() == 4);
  CHECK(m.at(0, 1) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(m.at(2, 2) == 0.0);

  double rho = 0.0;
  CHECK(m.symmetric_scalar(&rho));
  CHECK(rho == doctest::Approx(0.2).epsilon(1e-12));

  m.set(0, 1, 0.7);
  CHECK_FALSE(m.symmetric_scalar());

  CHECK(code_of([] { SharingMatrix::symmetric(4, 1.5); }) == Errc::validation_error);
  CHECK(code_of([&] { m.set(1, 1, 0.3); }) == Errc::validation_error);
  CHECK(code_of([&] { m.at(0, 9); }) == Errc::index_out_of_range);
  CHECK(code_of([] {
          SharingMatrix::from_rows({{0.0, 0.5}, {0.5, 0.0, 0.1}});
        }) == Errc::validation_error);
}

TEST_CASE("workforce partitions must cover, stay disjoint, and price reluctance") {
  const ModelParams params = p0();
  WorkerPartition part = WorkerPartition::all_screeners(4);
  CHECK_NOTHROW(part.validate(params));

  part.screeners = WorkerSet{0, 1, 2};
  part.reluctant = WorkerSet{3};
  part.q_reluctant = 0.8;
  CHECK_NOTHROW(part.validate(params));

  part.q_reluctant = 0.5;  // at or below the prior
  CHECK(code_of([&] { part.validate(params); }) == Errc::partition_violation);

  part.q_reluctant = 0.8;
  part.reluctant = WorkerSet{2, 3};
  CHECK(code_of([&] { part.validate(params); }) == Errc::partition_violation);

  part.screeners = WorkerSet{0, 1};
  part.reluctant = WorkerSet{3};
  CHECK(code_of([&] { part.validate(params); }) == Errc::partition_violation);
}

TEST_CASE("wage profiles are keyed to their screening set") {
  const WorkerSet c{0, 2};
  const WageProfile w = WageProfile::uniform(c, 1.1);
  CHECK(w.domain_is(c));
  CHECK_FALSE(w.domain_is(WorkerSet{0, 1}));
  CHECK(w.at(2) == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(w.sum() == doctest::Approx(2.2).epsilon(1e-12));
  CHECK(code_of([&] { w.at(1); }) == Errc::profile_mismatch);

  WageProfile bad = w;
  bad.offers[0] = -0.5;
  CHECK(code_of([&] { bad.validate(c); }) == Errc::validation_error);
  CHECK(code_of([&] { w.validate(WorkerSet{0}); }) == Errc::profile_mismatch);
}

TEST_CASE("model errors carry their code") {
  try {
    fail(Errc::belief_too_low, "probe");
    FAIL("fail() must throw");
  } catch (const ModelError& e) {
    CHECK(e.code() == Errc::belief_too_low);
    CHECK(std::string(e.what()).find("probe") != std::string::npos);
  }
}
