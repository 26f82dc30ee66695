#include <string>
#include <vector>

#include <CLI11.hpp>

#include "softirl/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Entropy-regularized inverse reinforcement learning on finite MDPs"};
  app.require_subcommand(1);

  softirl::CliOptions solve_opts;
  auto* solve = app.add_subcommand("solve", "Solve the forward problem for a fixed reward");
  solve->add_option("--config", solve_opts.config, "Run configuration file")->required();
  std::vector<std::uint64_t> solve_seeds;
  solve->add_option("--seed", solve_seeds, "Seed list override")->delimiter(',');
  std::string solve_out;
  solve->add_option("--out", solve_out, "Output directory override");

  softirl::CliOptions irl_opts;
  auto* irl = app.add_subcommand("irl", "Run the IRL sweep over seeds");
  irl->add_option("--config", irl_opts.config, "Run configuration file")->required();
  std::vector<std::uint64_t> irl_seeds;
  irl->add_option("--seed", irl_seeds, "Seed list override")->delimiter(',');
  std::string irl_out;
  irl->add_option("--out", irl_out, "Output directory override");
  irl->add_option("--threads", irl_opts.threads, "Seed-sweep worker count")
      ->check(CLI::PositiveNumber);

  softirl::VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "Run randomized property suites");
  verify->add_option("--suite", verify_opts.suite, "Suite name or \"all\"");
  verify->add_option("--seed", verify_opts.seed, "Base instance seed");
  verify->add_option("--trials", verify_opts.trials, "Randomized trials per suite");
  std::string verify_out;
  verify->add_option("--out", verify_out, "Report directory");

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) {
    if (!solve_seeds.empty()) solve_opts.seeds = solve_seeds;
    if (!solve_out.empty()) solve_opts.out = solve_out;
    return softirl::cmd_solve(solve_opts);
  }
  if (irl->parsed()) {
    if (!irl_seeds.empty()) irl_opts.seeds = irl_seeds;
    if (!irl_out.empty()) irl_opts.out = irl_out;
    return softirl::cmd_irl(irl_opts);
  }
  if (!verify_out.empty()) verify_opts.out = verify_out;
  return softirl::cmd_verify(verify_opts);
}
