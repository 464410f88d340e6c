#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include "expmap/verify.hpp"

using namespace expmap;

namespace {

bool report(const CriterionResult& r) {
  std::printf("CRITERION %d: %s - %s (%s)\n", r.id,
              r.pass ? "PASS" : "FAIL", r.name.c_str(), r.details.c_str());
  std::fflush(stdout);
  return r.pass;
}

}  // namespace

TEST_CASE("criterion 1: period-1 closed forms", "[c1]") {
  REQUIRE(report(criterion1()));
}

TEST_CASE("criterion 2: internal ray landings", "[c2]") {
  REQUIRE(report(criterion2()));
}

TEST_CASE("criterion 3: ray asymptotic defect", "[c3]") {
  REQUIRE(report(criterion3()));
}

TEST_CASE("criterion 4: vertical order at large potential", "[c4]") {
  REQUIRE(report(criterion4()));
}

TEST_CASE("criterion 5: pinned ray landings", "[c5]") {
  REQUIRE(report(criterion5()));
}

TEST_CASE("criterion 6: kneading sequences", "[c6]") {
  REQUIRE(report(criterion6()));
}

TEST_CASE("criterion 7: ray itineraries", "[c7]") {
  REQUIRE(report(criterion7()));
}

TEST_CASE("criterion 8: period-3 census and chains", "[c8]") {
  REQUIRE(report(criterion8()));
}

TEST_CASE("criterion 9: render determinism", "[c9]") {
  REQUIRE(report(criterion9()));
}
