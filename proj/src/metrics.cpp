#include "softirl/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "softirl/exact.hpp"

namespace softirl {

double tv_metric(const Policy& pi1, const Policy& pi2) {
  if (pi1.n_states() != pi2.n_states() || pi1.n_actions() != pi2.n_actions()) {
    throw std::invalid_argument("tv_metric: policy shapes differ");
  }
  double worst = 0.0;
  for (int s = 0; s < pi1.n_states(); ++s) {
    const double d = 0.5 * (pi1.probs.row(s) - pi2.probs.row(s)).lpNorm<1>();
    worst = std::max(worst, d);
  }
  return worst;
}

double ipm(const VectorXd& sigma1, const VectorXd& sigma2) {
  if (sigma1.size() != sigma2.size()) {
    throw std::invalid_argument("ipm: dimension mismatch");
  }
  return (sigma1 - sigma2).lpNorm<Eigen::Infinity>();
}

double true_reward_gap(const RewardWeights& w_true, const VectorXd& sigma_pi,
                       const VectorXd& sigma_e) {
  if (sigma_pi.size() != w_true.w.size() || sigma_e.size() != w_true.w.size()) {
    throw std::invalid_argument("true_reward_gap: dimension mismatch");
  }
  return w_true.w.dot(sigma_pi - sigma_e);
}

double expert_suboptimality(const Mdp& m, const RewardTable& r, const Policy& pi_expert) {
  return optimal_objective_value(m, r) - objective_value(m, r, pi_expert);
}

PinskerReport pinsker_chain(const Mdp& m, const RewardTable& r, const Policy& pi_expert) {
  const ValuePair vp = soft_value_iteration(m, r);
  const Policy pi_star = optimal_policy(vp, m.temperature);

  PinskerReport rep;
  rep.rhs = m.initial_dist.dot(vp.v) - objective_value(m, r, pi_expert);
  rep.tv = tv_metric(pi_expert, pi_star);
  rep.vartheta_e = occupancy(m, pi_expert).nu.minCoeff();
  rep.assumption_holds = rep.vartheta_e > 0.0;
  if (rep.assumption_holds) {
    rep.lhs = 2.0 * m.temperature * rep.vartheta_e / (1.0 - m.discount) * rep.tv * rep.tv;
  }
  return rep;
}

MetricReport evaluate_metrics(const Mdp& m, const FeatureMap& phi, const RewardTable& r,
                              const Policy& pi_expert,
                              const std::optional<RewardWeights>& w_true) {
  const ValuePair vp = soft_value_iteration(m, r);
  const Policy pi_star = optimal_policy(vp, m.temperature);
  const VectorXd sigma_star = feature_expectation_exact(m, pi_star, phi);
  const VectorXd sigma_e = feature_expectation_exact(m, pi_expert, phi);

  MetricReport rep;
  rep.expert_subopt = m.initial_dist.dot(vp.v) - objective_value(m, r, pi_expert);
  rep.tv = tv_metric(pi_expert, pi_star);
  rep.ipm = ipm(sigma_star, sigma_e);
  if (w_true) rep.true_gap = true_reward_gap(*w_true, sigma_star, sigma_e);

  const PinskerReport pr = pinsker_chain(m, r, pi_expert);
  rep.pinsker_lhs = pr.lhs;
  rep.pinsker_rhs = pr.rhs;
  rep.vartheta_e = pr.vartheta_e;
  rep.assumption3_holds = pr.assumption_holds;
  return rep;
}

}  // namespace softirl
