#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace softirl {

/// Outcome of one randomized property check. Margins are oriented so that
/// pass == (margin >= 0); the instance seed reproduces the trial via
/// `verify --suite <name> --seed <instance_seed> --trials 1`.
struct CheckResult {
  std::string suite;
  int trial = 0;
  std::uint64_t instance_seed = 0;
  double margin = 0.0;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  int trials = 0;
  int failures = 0;
  double worst_margin = 0.0;
  std::uint64_t worst_seed = 0;
};

/// Names of all registered property suites, in execution order.
std::vector<std::string> verify_suite_names();

/// Runs one suite over `trials` randomized instances seeded seed, seed+1, ...
/// Throws std::invalid_argument for unknown suite names.
std::vector<CheckResult> run_verify_suite(const std::string& suite, std::uint64_t seed,
                                          int trials);

SuiteReport summarize(const std::vector<CheckResult>& results);

}  // namespace softirl
