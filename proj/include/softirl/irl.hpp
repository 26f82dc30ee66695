#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "softirl/mdp.hpp"
#include "softirl/sampling.hpp"

namespace softirl {

/// Euclidean projection onto {y : ||y||_1 <= radius} by sort-based
/// soft-thresholding. Interior points are returned unchanged.
VectorXd project_l1_ball(const VectorXd& v, double radius);

/// Stochastic soft policy iteration step: row-wise softmax of q_hat/tau.
Policy policy_update(const RowMatrixXd& q_hat, double tau);

/// Projected gradient step w <- P_W(w - eta (sigma_pi_hat - sigma_e_hat)).
RewardWeights reward_step(const RewardWeights& w, const VectorXd& sigma_pi_hat,
                          const VectorXd& sigma_e_hat, double eta_w);

/// Reward learning rate (1-gamma) / (sqrt(k T) ||phi||_inf).
double default_stepsize(int k, int iterations, double gamma, double phi_sup);

/// Which constant the auto stepsize uses: sqrt(kT) is the headline rate,
/// sqrt(2kT) the constant used inside the regret analysis.
enum class StepsizeRule { SqrtKT, Sqrt2KT };

struct IrlConfig {
  int iterations = 100;  // T
  int batch_size = 1;    // B
  std::optional<double> eta_w;  // nullopt = auto from the stepsize rule
  std::uint64_t seed = 0;
  std::optional<int> horizon_cap;  // off by default; introduces bias when set
  int snapshot_cadence = 0;        // 0 = ceil(T/100)
  StepsizeRule stepsize_rule = StepsizeRule::SqrtKT;
  int threads = 1;  // width of the per-(s,a) estimation loop
};

/// Optional exact-oracle instrumentation, evaluated outside the algorithm's
/// sampling path. The algorithm itself only ever touches the
/// GenerativeModel interface.
struct ExactDiagnostics {
  const Mdp* mdp = nullptr;
  const Policy* pi_expert = nullptr;  // needed for expert_subopt / pinsker
  int cadence = 1;                    // applies to the *_subopt evaluations
  bool policy_subopt = false;         // J*_{r^t} - J^{pi^t}_{r^t}
  bool expert_subopt = false;         // J*_{r^t} - J^{pi^E}_{r^t}
  bool pinsker = false;               // chain for r^t at cadence
  bool exact_sigma = false;           // sigma^{pi^t} every iteration
};

struct IrlIterRecord {
  int t = 0;
  VectorXd w;          // iterate entering this iteration
  VectorXd sigma_hat;  // Monte Carlo feature expectation of pi^t
  double grad_linf = 0.0;
  double w_l1 = 0.0;
  std::uint64_t samples_total = 0;  // cumulative over the run
  std::optional<double> policy_subopt_exact;
  std::optional<double> expert_subopt_exact;
  std::optional<double> pinsker_lhs;
  std::optional<double> pinsker_rhs;
  std::optional<VectorXd> sigma_exact;
  std::optional<RowMatrixXd> pi_snapshot;
};

struct IrlTrace {
  std::vector<IrlIterRecord> records;
  VectorXd w_bar;          // (1/T) sum_t w^t
  VectorXd final_weights;  // w^T, after the last step
  Policy final_policy;
  std::uint64_t samples_total = 0;
  double eta_w = 0.0;
  double wall_seconds = 0.0;  // never serialized; outputs stay byte-stable
};

/// Estimator or diagnostic failure inside the iteration loop; carries the
/// iterations completed before the abort.
struct IrlRunError : std::runtime_error {
  IrlTrace partial_trace;

  IrlRunError(const std::string& what, IrlTrace partial)
      : std::runtime_error(what), partial_trace(std::move(partial)) {}
};

/// Single-loop primal-dual IRL: per iteration, estimate Q^{pi^t}_{r^t} for
/// every state-action pair and sigma^{pi^t} from the generative model, then
/// apply the softmax policy update and the projected gradient reward step.
/// Deterministic given (config seed); independent of `threads`.
IrlTrace run_irl(const GenerativeModel& model, const FeatureMap& phi,
                 const VectorXd& sigma_e_hat, const IrlConfig& cfg,
                 const ExactDiagnostics* diag = nullptr);

/// Realized reward-player regret
///   sum_t L(pi^t, w^t) - min_{w in W} sum_t L(pi^t, w)
/// evaluated with the exact sigma^{pi^t} stored in the trace (requires
/// ExactDiagnostics::exact_sigma). The entropy terms of L cancel.
double reward_player_regret(const IrlTrace& trace, const VectorXd& sigma_e_hat);

}  // namespace softirl
