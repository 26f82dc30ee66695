#pragma once

#include <stdexcept>
#include <vector>

#include "softirl/mdp.hpp"

namespace softirl {

/// Raised when an iterative solver exhausts its iteration cap. Carries the
/// per-sweep sup-norm residuals for diagnosis.
struct SolverFailure : std::runtime_error {
  std::vector<double> residual_history;

  SolverFailure(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
};

/// Value function pair (V, Q) with the final Bellman residual.
struct ValuePair {
  VectorXd v;      // S
  RowMatrixXd q;   // S x A
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
};

/// State occupancy nu and state-action occupancy mu(s,a) = nu(s) pi(a|s),
/// both normalized distributions.
struct OccupancyPair {
  VectorXd nu;     // S
  RowMatrixXd mu;  // S x A
};

struct SoftSubopt {
  double gap = 0.0;      // J*_r - J^pi_r
  double kl_form = 0.0;  // (tau/(1-gamma)) sum_s nu^pi(s) KL(pi || pi*_r)
};

/// Fixed point of V(s) = tau log sum_a exp((r(s,a) + gamma E[V(s')])/tau).
/// Returns the optimal pair; Q = r + gamma P V and V is recomputed from Q so
/// the pair is exactly softmax-consistent.
ValuePair soft_value_iteration(const Mdp& m, const RewardTable& r, double tol = 1e-10);

/// pi*(a|s) proportional to exp(Q(s,a)/tau), computed with max-subtraction.
Policy optimal_policy(const ValuePair& vp, double tau);

/// Q^pi and V^pi for a fixed policy, V^pi(s) = sum_a pi(a|s)(Q(s,a) - tau log pi(a|s)).
ValuePair policy_evaluation(const Mdp& m, const RewardTable& r, const Policy& pi,
                            double tol = 1e-10);

/// Solves the Bellman flow constraints
///   nu(s) = gamma sum_{s',a'} P(s|s',a') mu(s',a') + (1-gamma) nu0(s)
/// by direct LU below kOccupancyDirectLimit states, iteratively above.
OccupancyPair occupancy(const Mdp& m, const Policy& pi);

inline constexpr int kOccupancyDirectLimit = 2048;

/// sigma^pi = (1/(1-gamma)) sum_{s,a} mu^pi(s,a) phi(s,a).
VectorXd feature_expectation_exact(const Mdp& m, const Policy& pi, const FeatureMap& phi);

/// Entropy-regularized discounted objective in occupancy form:
/// J^pi_r = (1/(1-gamma)) sum_{s,a} mu(s,a) (r(s,a) - tau log pi(a|s)).
double objective_value(const Mdp& m, const RewardTable& r, const Policy& pi);

/// Optimal objective J*_r = sum_s nu0(s) V*(s).
double optimal_objective_value(const Mdp& m, const RewardTable& r, double tol = 1e-10);

/// Both sides of the soft suboptimality identity; they agree up to solver
/// tolerance.
SoftSubopt soft_suboptimality(const Mdp& m, const RewardTable& r, const Policy& pi);

/// max_s nu^{pi_ref}(s) / nu^{pi}(s). Throws std::domain_error naming the
/// starved state when nu^pi vanishes somewhere.
double distribution_mismatch(const Mdp& m, const Policy& pi, const Policy& pi_ref);

/// Discounted causal entropy (1/(1-gamma)) sum_s nu^pi(s) H(pi(.|s)).
double discounted_causal_entropy(const Mdp& m, const Policy& pi);

/// Row-wise softmax of x/tau with max-subtraction; rows sum to 1 and are
/// strictly positive.
RowMatrixXd softmax_rows(const RowMatrixXd& x, double tau);

/// tau * log sum exp(x/tau) per row, stabilized.
double log_sum_exp_tau(const double* x, int n, double tau);

}  // namespace softirl
