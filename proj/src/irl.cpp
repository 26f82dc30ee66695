#include "softirl/irl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "softirl/exact.hpp"
#include "softirl/metrics.hpp"
#include "softirl/parallel.hpp"

namespace softirl {

VectorXd project_l1_ball(const VectorXd& v, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("project_l1_ball: radius must be > 0");
  if (!v.allFinite()) throw std::invalid_argument("project_l1_ball: non-finite input");
  if (v.lpNorm<1>() <= radius) return v;

  // Find the soft threshold theta with sum_i max(|v_i| - theta, 0) = radius
  // via the sorted cumulative-sum rule.
  std::vector<double> mag(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) mag[i] = std::abs(v(i));
  std::sort(mag.begin(), mag.end(), std::greater<double>());

  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < mag.size(); ++j) {
    cumsum += mag[j];
    const double candidate = (cumsum - radius) / static_cast<double>(j + 1);
    if (mag[j] > candidate) {
      theta = candidate;
    } else {
      break;
    }
  }

  VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double shrunk = std::max(std::abs(v(i)) - theta, 0.0);
    out(i) = v(i) < 0.0 ? -shrunk : shrunk;
  }
  return out;
}

Policy policy_update(const RowMatrixXd& q_hat, double tau) {
  if (!q_hat.allFinite()) throw std::invalid_argument("policy_update: non-finite Q estimate");
  if (!(tau > 0.0)) throw std::invalid_argument("policy_update: tau must be > 0");
  Policy pi;
  pi.probs = softmax_rows(q_hat, tau);
  return pi;
}

RewardWeights reward_step(const RewardWeights& w, const VectorXd& sigma_pi_hat,
                          const VectorXd& sigma_e_hat, double eta_w) {
  if (sigma_pi_hat.size() != w.w.size() || sigma_e_hat.size() != w.w.size()) {
    throw std::invalid_argument("reward_step: dimension mismatch");
  }
  if (!(eta_w > 0.0)) throw std::invalid_argument("reward_step: eta_w must be > 0");
  return RewardWeights(project_l1_ball(w.w - eta_w * (sigma_pi_hat - sigma_e_hat), 1.0));
}

double default_stepsize(int k, int iterations, double gamma, double phi_sup) {
  if (k < 1 || iterations < 1) throw std::invalid_argument("default_stepsize: k, T must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("default_stepsize: gamma in (0,1)");
  if (!(phi_sup > 0.0)) throw std::invalid_argument("default_stepsize: ||phi||_inf must be > 0");
  return (1.0 - gamma) / (std::sqrt(static_cast<double>(k) * iterations) * phi_sup);
}

namespace {

constexpr std::uint64_t kQLabel = 0x51;
constexpr std::uint64_t kSigmaLabel = 0x53;

double resolve_stepsize(const IrlConfig& cfg, int k, double gamma, double phi_sup) {
  if (cfg.eta_w) {
    if (!(*cfg.eta_w > 0.0)) throw std::invalid_argument("run_irl: eta_w must be > 0");
    return *cfg.eta_w;
  }
  const double eta = default_stepsize(k, cfg.iterations, gamma, phi_sup);
  return cfg.stepsize_rule == StepsizeRule::Sqrt2KT ? eta / std::sqrt(2.0) : eta;
}

}  // namespace

IrlTrace run_irl(const GenerativeModel& model, const FeatureMap& phi,
                 const VectorXd& sigma_e_hat, const IrlConfig& cfg,
                 const ExactDiagnostics* diag) {
  const int S = model.n_states();
  const int A = model.n_actions();
  const int k = phi.k;
  if (cfg.iterations < 1 || cfg.batch_size < 1) {
    throw std::invalid_argument("run_irl: T and B must be >= 1");
  }
  if (sigma_e_hat.size() != k) {
    throw std::invalid_argument("run_irl: sigma_e_hat dimension does not match feature map");
  }
  if (phi.n_states != S || phi.n_actions != A) {
    throw std::invalid_argument("run_irl: feature map shape does not match model");
  }

  const auto t_start = std::chrono::steady_clock::now();
  const double eta = resolve_stepsize(cfg, k, model.gamma(), phi.sup_norm);
  const int cadence =
      cfg.snapshot_cadence > 0 ? cfg.snapshot_cadence : (cfg.iterations + 99) / 100;

  IrlTrace trace;
  trace.eta_w = eta;
  trace.records.reserve(cfg.iterations);

  Policy pi = Policy::uniform(S, A);
  VectorXd w = VectorXd::Zero(k);
  VectorXd w_sum = VectorXd::Zero(k);

  const std::uint64_t samples_base = model.samples_consumed();
  RngStream root(cfg.seed);
  RowMatrixXd q_hat(S, A);

  auto run_iteration = [&](int t) {
    const RewardWeights w_t{w};
    const RewardTable r_t = reward_of(w_t, phi);
    RngStream iter_stream = root.child(static_cast<std::uint64_t>(t));

    const RngStream q_base = iter_stream.child(kQLabel);
    parallel_for(S * A, cfg.threads, [&](int sa) {
      RngStream pair_rng = q_base.child(static_cast<std::uint64_t>(sa));
      q_hat(sa / A, sa % A) = est_q(sa / A, sa % A, pi, r_t, cfg.batch_size, model,
                                    pair_rng, cfg.horizon_cap);
    });

    RngStream sigma_rng = iter_stream.child(kSigmaLabel);
    const VectorXd sigma_hat =
        est_sigma(pi, phi, cfg.batch_size, model, sigma_rng, cfg.horizon_cap);

    IrlIterRecord rec;
    rec.t = t;
    rec.w = w;
    rec.sigma_hat = sigma_hat;
    rec.grad_linf = (sigma_hat - sigma_e_hat).lpNorm<Eigen::Infinity>();
    rec.w_l1 = w.lpNorm<1>();
    rec.samples_total = model.samples_consumed() - samples_base;

    if (diag && diag->mdp) {
      const bool at_cadence = diag->cadence > 0 && t % diag->cadence == 0;
      if (diag->exact_sigma) {
        rec.sigma_exact = feature_expectation_exact(*diag->mdp, pi, phi);
      }
      if (at_cadence && diag->policy_subopt) {
        rec.policy_subopt_exact =
            optimal_objective_value(*diag->mdp, r_t) - objective_value(*diag->mdp, r_t, pi);
      }
      if (at_cadence && diag->expert_subopt && diag->pi_expert) {
        rec.expert_subopt_exact = expert_suboptimality(*diag->mdp, r_t, *diag->pi_expert);
      }
      if (at_cadence && diag->pinsker && diag->pi_expert) {
        const PinskerReport pr = pinsker_chain(*diag->mdp, r_t, *diag->pi_expert);
        rec.pinsker_lhs = pr.lhs;
        rec.pinsker_rhs = pr.rhs;
      }
    }
    if (t % cadence == 0) rec.pi_snapshot = pi.probs;
    trace.records.push_back(std::move(rec));

    w_sum += w;
    pi = policy_update(q_hat, model.tau());
    w = reward_step(w_t, sigma_hat, sigma_e_hat, eta).w;
  };

  for (int t = 0; t < cfg.iterations; ++t) {
    try {
      run_iteration(t);
    } catch (const std::exception& e) {
      trace.samples_total = model.samples_consumed() - samples_base;
      throw IrlRunError("run_irl aborted at iteration " + std::to_string(t) + ": " + e.what(),
                        std::move(trace));
    }
  }

  trace.w_bar = w_sum / static_cast<double>(cfg.iterations);
  trace.final_weights = w;
  trace.final_policy = std::move(pi);
  trace.samples_total = model.samples_consumed() - samples_base;
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return trace;
}

double reward_player_regret(const IrlTrace& trace, const VectorXd& sigma_e_hat) {
  if (trace.records.empty()) throw std::invalid_argument("reward_player_regret: empty trace");
  VectorXd diff_sum = VectorXd::Zero(sigma_e_hat.size());
  double played = 0.0;
  for (const auto& rec : trace.records) {
    if (!rec.sigma_exact) {
      throw std::invalid_argument(
          "reward_player_regret: trace lacks exact feature expectations "
          "(enable ExactDiagnostics::exact_sigma)");
    }
    const VectorXd diff = *rec.sigma_exact - sigma_e_hat;
    played += rec.w.dot(diff);
    diff_sum += diff;
  }
  // min over the L1 ball of <w, diff_sum> is -||diff_sum||_inf.
  return played + diff_sum.lpNorm<Eigen::Infinity>();
}

}  // namespace softirl
