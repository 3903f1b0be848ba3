#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>

#include "flagcalc/selftest.hpp"

// Full-scale acceptance gate.  Prints one [PASS]/[FAIL] line per criterion
// and fails the binary if any criterion fails.
TEST_CASE("acceptance criteria at full scale") {
  const flagcalc::selftest::Report report =
      flagcalc::selftest::run(flagcalc::selftest::Scale::full, 20240801);
  std::fputs(flagcalc::selftest::format(report).c_str(), stdout);
  std::fflush(stdout);

  for (const flagcalc::selftest::CriterionResult& c : report.criteria) {
    INFO("criterion ", c.number, " (", c.name, "): ", c.detail);
    CHECK(c.pass);
  }
  CHECK(report.all_pass);
}
