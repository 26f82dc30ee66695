#pragma once

#include <optional>

#include "softirl/mdp.hpp"

namespace softirl {

/// max_s (1/2) sum_a |pi1(a|s) - pi2(a|s)|.
double tv_metric(const Policy& pi1, const Policy& pi2);

/// max_{||w||_1 <= 1} <w, sigma1 - sigma2> = ||sigma1 - sigma2||_inf.
double ipm(const VectorXd& sigma1, const VectorXd& sigma2);

/// <w_true, sigma_pi - sigma_e>.
double true_reward_gap(const RewardWeights& w_true, const VectorXd& sigma_pi,
                       const VectorXd& sigma_e);

/// J*_r - J^{pi_e}_r, the suboptimality of the expert under reward r.
double expert_suboptimality(const Mdp& m, const RewardTable& r, const Policy& pi_expert);

struct PinskerReport {
  double lhs = 0.0;  // (2 tau vartheta_e / (1-gamma)) * (max_s TV)^2
  double rhs = 0.0;  // J*_r - J^{pi_e}_r
  double tv = 0.0;   // max_s TV(pi_e, pi*_r)
  double vartheta_e = 0.0;  // min_s nu^{pi_e}(s)
  bool assumption_holds = true;  // vartheta_e > 0
};

/// Lower-bounds the expert suboptimality by policy closeness via Pinsker.
/// When some state is starved under the expert the report is flagged
/// instead of raising.
PinskerReport pinsker_chain(const Mdp& m, const RewardTable& r, const Policy& pi_expert);

struct MetricReport {
  double expert_subopt = 0.0;
  double tv = 0.0;   // between pi_expert and pi*_r
  double ipm = 0.0;  // between exact feature expectations of the two
  std::optional<double> true_gap;
  double pinsker_lhs = 0.0;
  double pinsker_rhs = 0.0;
  double vartheta_e = 0.0;
  bool assumption3_holds = true;
};

/// Full comparison of the soft-optimal policy of `r` against the expert.
MetricReport evaluate_metrics(const Mdp& m, const FeatureMap& phi, const RewardTable& r,
                              const Policy& pi_expert,
                              const std::optional<RewardWeights>& w_true);

}  // namespace softirl
