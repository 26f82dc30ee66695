#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace softirl {

using Eigen::VectorXd;
using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Tolerance for probability rows (transition kernel, initial distribution,
/// policy rows).
inline constexpr double kProbTol = 1e-12;
/// Tolerance for membership in the L1 weight ball after projection roundoff.
inline constexpr double kWeightTol = 1e-9;
/// Regularization temperatures below this are rejected by the solvers.
inline constexpr double kMinTemperature = 1e-6;

/// Finite entropy-regularized MDP (S, A, P, nu0, gamma, tau).
///
/// The kernel is stored dense as an (S*A) x S matrix; row s*n_actions + a
/// holds P(.|s,a). All types in this module are immutable after construction
/// by convention and safe to share across threads read-only.
struct Mdp {
  int n_states = 0;
  int n_actions = 0;
  RowMatrixXd transition;  // (S*A) x S
  VectorXd initial_dist;   // S
  double discount = 0.0;   // gamma in (0,1)
  double temperature = 0.0;  // tau > 0

  int sa_index(int s, int a) const { return s * n_actions + a; }
  const double* transition_row(int s, int a) const {
    return transition.data() + static_cast<std::ptrdiff_t>(sa_index(s, a)) * n_states;
  }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Reports every violated Mdp invariant; empty report means well-formed.
ValidationReport validate_mdp(const Mdp& m);

/// Throws std::invalid_argument listing all violations when the MDP is
/// malformed; returns the input unchanged otherwise.
const Mdp& require_valid(const Mdp& m);

/// Feature table phi(s,a) in R^k; row s*n_actions + a of `values`.
struct FeatureMap {
  int n_states = 0;
  int n_actions = 0;
  int k = 0;
  RowMatrixXd values;   // (S*A) x k
  double sup_norm = 0.0;  // max |phi_i(s,a)|, cached at construction

  FeatureMap() = default;
  FeatureMap(int n_states, int n_actions, RowMatrixXd values);

  int sa_index(int s, int a) const { return s * n_actions + a; }
  auto row(int s, int a) const { return values.row(sa_index(s, a)); }
};

/// Weight vector constrained to the unit L1 ball W.
struct RewardWeights {
  VectorXd w;

  explicit RewardWeights(VectorXd w_in);
  int k() const { return static_cast<int>(w.size()); }
};

/// Tabular stochastic policy; row s of `probs` is the action distribution
/// at state s.
struct Policy {
  RowMatrixXd probs;  // S x A

  static Policy uniform(int n_states, int n_actions);
  int n_states() const { return static_cast<int>(probs.rows()); }
  int n_actions() const { return static_cast<int>(probs.cols()); }
  const double* row(int s) const {
    return probs.data() + static_cast<std::ptrdiff_t>(s) * probs.cols();
  }
};

/// Throws std::invalid_argument when a policy row fails to be a probability
/// vector (within kProbTol).
void check_policy(const Policy& pi);

/// Dense reward table r(s,a).
struct RewardTable {
  RowMatrixXd values;  // S x A

  double max_abs() const { return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff(); }
};

/// r_w(s,a) = <w, phi(s,a)>.
RewardTable reward_of(const RewardWeights& w, const FeatureMap& phi);

/// Shannon entropy in nats with the 0 log 0 = 0 convention. Validates that
/// the input is a probability vector.
double shannon_entropy(const VectorXd& dist);

/// Entropy of a raw probability row (no validation; 0 log 0 = 0).
double entropy_nats(const double* p, int n);

/// KL(p || q) in nats; terms with p_i = 0 contribute 0. Returns +inf when
/// q_i = 0 < p_i.
double kl_nats(const double* p, const double* q, int n);

}  // namespace softirl
