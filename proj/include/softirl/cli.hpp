#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace softirl {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericFailure = 3;

struct CliOptions {
  std::filesystem::path config;
  std::optional<std::vector<std::uint64_t>> seeds;  // --seed override
  std::optional<std::filesystem::path> out;         // --out override
  int threads = 1;                                  // seed-sweep workers
};

struct VerifyOptions {
  std::string suite = "all";
  std::uint64_t seed = 0;
  int trials = 100;
  std::optional<std::filesystem::path> out;  // report directory
};

/// Solves the configured environment's forward problem for the configured
/// reward and writes V*, Q*, pi*, nu^{pi*}, sigma^{pi*}.
int cmd_solve(const CliOptions& opts);

/// Runs the IRL sweep: one trace and recovered-weights file per seed plus a
/// summary row per seed. Per-seed failures are recorded and the sweep
/// continues.
int cmd_irl(const CliOptions& opts);

/// Runs the named property suite ("all" for every suite) and reports
/// per-suite pass/fail with margins.
int cmd_verify(const VerifyOptions& opts);

}  // namespace softirl
