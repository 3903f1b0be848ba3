#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flagcalc::selftest {

// The acceptance suite: ten numbered criteria with pinned exact values and
// statistical thresholds.  `small` trims panel sizes and sample counts to
// finish within about a minute; `full` runs the complete suite.
enum class Scale { small, full };

struct CriterionResult {
  int number = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // deterministic for a fixed seed
};

struct Report {
  Scale scale = Scale::small;
  std::uint64_t seed = 0;
  std::vector<CriterionResult> criteria;
  bool all_pass = false;
};

// Runs every criterion (a failure never aborts the rest).  Wall-clock
// timings go to stderr; the returned report is byte-stable per (scale,
// seed).
Report run(Scale scale, std::uint64_t seed);

// One "[PASS]/[FAIL] criterion N" line per criterion plus a summary line.
std::string format(const Report& report);

}  // namespace flagcalc::selftest
