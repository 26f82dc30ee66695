#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "softirl/environments.hpp"
#include "softirl/irl.hpp"
#include "softirl/mdp.hpp"
#include "softirl/sampling.hpp"

namespace softirl {

/// Configuration/input problems that map to CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest round-trippable decimal form of a double; "." decimal point,
/// locale independent.
std::string format_double(double x);

// ---------------------------------------------------------------------------
// MDP description files (JSON). Required keys: n_states, n_actions, gamma,
// tau, transition ([s][a][s']), initial_dist. Optional: features
// ([s][a][i]), expert_policy ([s][a]), w_true ([k]). Unknown keys are
// rejected; the MDP is validated on load.
// ---------------------------------------------------------------------------

struct EnvironmentFile {
  Mdp mdp;
  std::optional<FeatureMap> phi;
  std::optional<Policy> pi_expert;
  std::optional<RewardWeights> w_true;
};

EnvironmentFile load_environment_file(const std::filesystem::path& path);
void save_environment_file(const EnvironmentBundle& bundle, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Expert datasets: one JSON header line {"n":..,"horizon":..,"seed":..}
// followed by one trajectory per line as [[s,a],...].
// ---------------------------------------------------------------------------

void save_expert_dataset(const ExpertDataset& data, const std::filesystem::path& path);
ExpertDataset load_expert_dataset(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Run configuration (JSON with strict key checking).
// ---------------------------------------------------------------------------

struct EnvironmentConfig {
  std::string name;  // "one_state" | "random" | "gridworld" | "" (file)
  std::filesystem::path file;
  std::optional<std::string> feature_override;  // one_hot_sa | one_hot_s | constant
  double gamma = 0.9;
  double tau = 1.0;
  // random
  int n_states = 4;
  int n_actions = 2;
  std::uint64_t env_seed = 0;
  double nu0_floor = 0.0;
  double expert_mix = 0.0;
  // gridworld
  int size = 4;
  double slip_prob = 0.1;
};

struct ExpertConfig {
  std::string source = "exact";  // "exact" | "dataset" | "file"
  int n = 100;
  int horizon = 100;
  std::uint64_t dataset_seed = 0;
  std::filesystem::path path;
};

struct EvaluationConfig {
  bool expert_subopt = false;
  bool policy_subopt = false;
  bool exact_sigma = false;
  bool pinsker = false;
  bool metrics = false;
  int cadence = 1;
};

struct RunConfig {
  EnvironmentConfig environment;
  IrlConfig algorithm;      // seed field is overwritten per sweep entry
  ExpertConfig expert;
  EvaluationConfig evaluation;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir = "out";
  std::optional<VectorXd> reward_w;  // `solve` reward override
};

RunConfig load_run_config(const std::filesystem::path& path);

/// Builds the configured environment (constructor call or file load, with
/// the optional feature override applied).
EnvironmentBundle build_environment(const EnvironmentConfig& cfg);

// ---------------------------------------------------------------------------
// CSV emission. All numbers use format_double; no wall-clock or locale
// content so identical runs emit identical bytes.
// ---------------------------------------------------------------------------

void write_trace_csv(const IrlTrace& trace, const EvaluationConfig& eval,
                     const std::filesystem::path& path);

struct SummaryRow {
  std::uint64_t seed = 0;
  std::string status = "ok";
  std::uint64_t samples_total = 0;
  double eta_w = 0.0;
  double w_bar_l1 = 0.0;
  std::optional<double> expert_subopt;
  std::optional<double> tv;
  std::optional<double> ipm;
  std::optional<double> true_gap;
  std::optional<double> pinsker_lhs;
  std::optional<double> pinsker_rhs;
  std::optional<double> vartheta_e;
};

void write_summary_csv(const std::vector<SummaryRow>& rows, const EvaluationConfig& eval,
                       const std::filesystem::path& path);

void write_weights_json(const VectorXd& w_bar, std::uint64_t seed, const IrlConfig& cfg,
                        double eta_w, std::uint64_t samples_total,
                        const std::filesystem::path& path);

}  // namespace softirl
