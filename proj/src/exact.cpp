#include "softirl/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace softirl {

namespace {

void require_solver_inputs(const Mdp& m, const RewardTable& r, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("solver tolerance must be > 0");
  if (m.temperature < kMinTemperature) {
    throw std::invalid_argument(
        "temperature " + std::to_string(m.temperature) +
        " below supported minimum " + std::to_string(kMinTemperature));
  }
  if (r.values.rows() != m.n_states || r.values.cols() != m.n_actions) {
    throw std::invalid_argument("reward table shape does not match MDP");
  }
}

// Iteration cap from the known contraction rate: the error decays like
// gamma^n from an initial scale of at most C/(1-gamma).
int iteration_cap(double tol, double gamma, double scale) {
  const double n = std::log(tol * (1.0 - gamma) / scale) / std::log(gamma);
  const double capped = std::min(n + 64.0, 5e7);
  return std::max(64, static_cast<int>(std::ceil(capped)));
}

// q = r + gamma * P v, written into a preallocated S x A table.
void bellman_q(const Mdp& m, const RewardTable& r, const VectorXd& v, RowMatrixXd& q) {
  Eigen::Map<VectorXd> q_flat(q.data(), q.size());
  q_flat.noalias() = m.transition * v;
  q_flat *= m.discount;
  q_flat += Eigen::Map<const VectorXd>(r.values.data(), r.values.size());
}

// V(s) = sum_a pi(a|s) (q(s,a) - tau log pi(a|s)); zero-probability actions
// contribute nothing.
double policy_backup(const double* pi_row, const double* q_row, int n, double tau) {
  double v = 0.0;
  for (int a = 0; a < n; ++a) {
    if (pi_row[a] > 0.0) v += pi_row[a] * (q_row[a] - tau * std::log(pi_row[a]));
  }
  return v;
}

}  // namespace

double log_sum_exp_tau(const double* x, int n, double tau) {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) m = std::max(m, x[i]);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::exp((x[i] - m) / tau);
  return m + tau * std::log(acc);
}

RowMatrixXd softmax_rows(const RowMatrixXd& x, double tau) {
  RowMatrixXd out(x.rows(), x.cols());
  for (Eigen::Index s = 0; s < x.rows(); ++s) {
    const double m = x.row(s).maxCoeff();
    double z = 0.0;
    for (Eigen::Index a = 0; a < x.cols(); ++a) {
      out(s, a) = std::exp((x(s, a) - m) / tau);
      z += out(s, a);
    }
    out.row(s) /= z;
  }
  return out;
}

ValuePair soft_value_iteration(const Mdp& m, const RewardTable& r, double tol) {
  require_solver_inputs(m, r, tol);
  const int S = m.n_states, A = m.n_actions;
  const double gamma = m.discount, tau = m.temperature;

  const double scale = std::max(1.0, r.max_abs() + tau * std::log(static_cast<double>(A)));
  const int cap = iteration_cap(tol, gamma, scale);

  ValuePair out;
  out.v = VectorXd::Zero(S);
  out.q.resize(S, A);
  VectorXd v_next(S);
  for (int it = 1; it <= cap; ++it) {
    bellman_q(m, r, out.v, out.q);
    for (int s = 0; s < S; ++s) {
      v_next(s) = log_sum_exp_tau(out.q.data() + static_cast<std::ptrdiff_t>(s) * A, A, tau);
    }
    const double res = (v_next - out.v).lpNorm<Eigen::Infinity>();
    out.residual_history.push_back(res);
    out.v.swap(v_next);
    if (res <= tol) {
      out.residual = res;
      out.iterations = it;
      // Recompute (Q, V) once more so V = tau log sum exp(Q/tau) holds exactly.
      bellman_q(m, r, out.v, out.q);
      for (int s = 0; s < S; ++s) {
        out.v(s) = log_sum_exp_tau(out.q.data() + static_cast<std::ptrdiff_t>(s) * A, A, tau);
      }
      return out;
    }
  }
  throw SolverFailure("soft_value_iteration: no convergence to tol " + std::to_string(tol) +
                          " within " + std::to_string(cap) + " sweeps",
                      std::move(out.residual_history));
}

Policy optimal_policy(const ValuePair& vp, double tau) {
  Policy pi;
  pi.probs = softmax_rows(vp.q, tau);
  return pi;
}

ValuePair policy_evaluation(const Mdp& m, const RewardTable& r, const Policy& pi, double tol) {
  require_solver_inputs(m, r, tol);
  if (pi.n_states() != m.n_states || pi.n_actions() != m.n_actions) {
    throw std::invalid_argument("policy shape does not match MDP");
  }
  const int S = m.n_states, A = m.n_actions;
  const double gamma = m.discount, tau = m.temperature;

  const double scale =
      std::max(1.0, r.max_abs() + tau * std::log(static_cast<double>(A)));
  const int cap = iteration_cap(tol, gamma, scale);

  ValuePair out;
  out.v = VectorXd::Zero(S);
  out.q.resize(S, A);
  VectorXd v_next(S);
  for (int it = 1; it <= cap; ++it) {
    bellman_q(m, r, out.v, out.q);
    for (int s = 0; s < S; ++s) {
      v_next(s) = policy_backup(pi.row(s), out.q.data() + static_cast<std::ptrdiff_t>(s) * A, A, tau);
    }
    const double res = (v_next - out.v).lpNorm<Eigen::Infinity>();
    out.residual_history.push_back(res);
    out.v.swap(v_next);
    if (res <= tol) {
      out.residual = res;
      out.iterations = it;
      bellman_q(m, r, out.v, out.q);
      for (int s = 0; s < S; ++s) {
        out.v(s) = policy_backup(pi.row(s), out.q.data() + static_cast<std::ptrdiff_t>(s) * A, A, tau);
      }
      return out;
    }
  }
  throw SolverFailure("policy_evaluation: no convergence to tol " + std::to_string(tol) +
                          " within " + std::to_string(cap) + " sweeps",
                      std::move(out.residual_history));
}

OccupancyPair occupancy(const Mdp& m, const Policy& pi) {
  if (pi.n_states() != m.n_states || pi.n_actions() != m.n_actions) {
    throw std::invalid_argument("policy shape does not match MDP");
  }
  const int S = m.n_states, A = m.n_actions;
  const double gamma = m.discount;

  // M(s', s) = sum_a pi(a|s) P(s'|s,a), the transposed policy kernel.
  RowMatrixXd mt = RowMatrixXd::Zero(S, S);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      const double p = pi.probs(s, a);
      if (p == 0.0) continue;
      const double* row = m.transition_row(s, a);
      for (int sp = 0; sp < S; ++sp) mt(sp, s) += p * row[sp];
    }
  }

  const VectorXd rhs = (1.0 - gamma) * m.initial_dist;
  VectorXd nu;
  if (S <= kOccupancyDirectLimit) {
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(S, S) - gamma * mt;
    nu = lhs.partialPivLu().solve(rhs);
    const double res = (lhs * nu - rhs).lpNorm<Eigen::Infinity>();
    if (!(res <= 1e-9)) {
      throw SolverFailure("occupancy: direct flow solve residual " + std::to_string(res), {res});
    }
  } else {
    // Power-series fallback; contraction with rate gamma.
    nu = rhs;
    VectorXd next(S);
    double change = 1.0;
    for (int it = 0; it < 50'000'000 && change > 1e-14; ++it) {
      next.noalias() = gamma * (mt * nu);
      next += rhs;
      change = (next - nu).lpNorm<1>();
      nu.swap(next);
    }
  }
  // Zero out LU roundoff on unreachable states.
  for (int s = 0; s < S; ++s) {
    if (nu(s) < 0.0 && nu(s) > -kProbTol) nu(s) = 0.0;
  }

  OccupancyPair out;
  out.nu = std::move(nu);
  out.mu = pi.probs.array().colwise() *
           Eigen::Map<const Eigen::ArrayXd>(out.nu.data(), S);
  return out;
}

VectorXd feature_expectation_exact(const Mdp& m, const Policy& pi, const FeatureMap& phi) {
  if (phi.n_states != m.n_states || phi.n_actions != m.n_actions) {
    throw std::invalid_argument("feature map shape does not match MDP");
  }
  const OccupancyPair occ = occupancy(m, pi);
  const Eigen::Map<const VectorXd> mu_flat(occ.mu.data(), occ.mu.size());
  return (phi.values.transpose() * mu_flat) / (1.0 - m.discount);
}

double objective_value(const Mdp& m, const RewardTable& r, const Policy& pi) {
  const OccupancyPair occ = occupancy(m, pi);
  const double tau = m.temperature;
  double acc = 0.0;
  for (int s = 0; s < m.n_states; ++s) {
    for (int a = 0; a < m.n_actions; ++a) {
      const double mu = occ.mu(s, a);
      if (mu == 0.0) continue;  // pi = 0 implies mu = 0; contributes nothing
      acc += mu * (r.values(s, a) - tau * std::log(pi.probs(s, a)));
    }
  }
  return acc / (1.0 - m.discount);
}

double optimal_objective_value(const Mdp& m, const RewardTable& r, double tol) {
  const ValuePair vp = soft_value_iteration(m, r, tol);
  return m.initial_dist.dot(vp.v);
}

SoftSubopt soft_suboptimality(const Mdp& m, const RewardTable& r, const Policy& pi) {
  const ValuePair vp = soft_value_iteration(m, r);
  const Policy pi_star = optimal_policy(vp, m.temperature);
  const OccupancyPair occ = occupancy(m, pi);

  SoftSubopt out;
  out.gap = m.initial_dist.dot(vp.v) - objective_value(m, r, pi);
  double kl_acc = 0.0;
  for (int s = 0; s < m.n_states; ++s) {
    kl_acc += occ.nu(s) * kl_nats(pi.row(s), pi_star.row(s), m.n_actions);
  }
  out.kl_form = m.temperature * kl_acc / (1.0 - m.discount);
  return out;
}

double distribution_mismatch(const Mdp& m, const Policy& pi, const Policy& pi_ref) {
  const VectorXd nu = occupancy(m, pi).nu;
  const VectorXd nu_ref = occupancy(m, pi_ref).nu;
  double worst = 0.0;
  for (int s = 0; s < m.n_states; ++s) {
    if (nu(s) <= 0.0) {
      throw std::domain_error("distribution_mismatch: state " + std::to_string(s) +
                              " has zero occupancy under the evaluated policy");
    }
    worst = std::max(worst, nu_ref(s) / nu(s));
  }
  return worst;
}

double discounted_causal_entropy(const Mdp& m, const Policy& pi) {
  const VectorXd nu = occupancy(m, pi).nu;
  double acc = 0.0;
  for (int s = 0; s < m.n_states; ++s) {
    acc += nu(s) * entropy_nats(pi.row(s), m.n_actions);
  }
  return acc / (1.0 - m.discount);
}

}  // namespace softirl
