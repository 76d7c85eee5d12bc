#pragma once

// Invariant suite: every structural property of the solvers, checked on
// generated instances and reported as observed value vs bound.

#include <gdsvd/rank1.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gdsvd::bench {

enum class VerifyLevel { Fast, Full };

VerifyLevel parse_level(const std::string& s);

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::Fast;
  std::uint64_t seed = 0;
  /// Update rule under test for the trajectory checks; tests swap in a broken
  /// one to make sure the checks can fail.
  StepRule step = adaptive_step;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double bound = 0.0;
  std::string detail;
};

std::vector<CheckResult> run_verify(const VerifyOptions& opts);

/// One line per check: "PASS name observed=... bound=... (detail)".
void print_checks(std::ostream& out, const std::vector<CheckResult>& checks);

}  // namespace gdsvd::bench
