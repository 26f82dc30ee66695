#include "softirl/environments.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <stdexcept>

#include "softirl/exact.hpp"
#include "softirl/rng.hpp"

namespace softirl {

namespace {

// Dirichlet(1,...,1) via normalized exponentials.
void fill_dirichlet(double* out, int n, RngStream& rng) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    out[i] = -std::log(rng.next_open_double());
    sum += out[i];
  }
  for (int i = 0; i < n; ++i) out[i] /= sum;
}

Policy expert_for(const Mdp& m, const RewardWeights& w_true, const FeatureMap& phi,
                  double expert_mix) {
  const RewardTable r = reward_of(w_true, phi);
  Policy pi = optimal_policy(soft_value_iteration(m, r), m.temperature);
  if (expert_mix > 0.0) {
    if (expert_mix > 1.0) throw std::invalid_argument("expert_mix must be in [0,1]");
    pi.probs = (1.0 - expert_mix) * pi.probs +
               expert_mix * RowMatrixXd::Constant(m.n_states, m.n_actions, 1.0 / m.n_actions);
  }
  return pi;
}

std::string describe(const char* fmt_str, ...) {
  char buf[192];
  va_list args;
  va_start(args, fmt_str);
  std::vsnprintf(buf, sizeof(buf), fmt_str, args);
  va_end(args);
  return std::string(buf);
}

}  // namespace

FeatureMap one_hot_sa_features(int n_states, int n_actions) {
  const int n = n_states * n_actions;
  return FeatureMap(n_states, n_actions, RowMatrixXd::Identity(n, n));
}

FeatureMap one_hot_state_features(int n_states, int n_actions) {
  RowMatrixXd values = RowMatrixXd::Zero(n_states * n_actions, n_states);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) values(s * n_actions + a, s) = 1.0;
  }
  return FeatureMap(n_states, n_actions, std::move(values));
}

FeatureMap constant_features(int n_states, int n_actions) {
  return FeatureMap(n_states, n_actions, RowMatrixXd::Ones(n_states * n_actions, 1));
}

EnvironmentBundle one_state_mdp(double gamma, double tau) {
  EnvironmentBundle b;
  b.mdp.n_states = 1;
  b.mdp.n_actions = 2;
  b.mdp.transition = RowMatrixXd::Ones(2, 1);
  b.mdp.initial_dist = VectorXd::Ones(1);
  b.mdp.discount = gamma;
  b.mdp.temperature = tau;
  require_valid(b.mdp);
  b.phi = constant_features(1, 2);
  b.w_true = RewardWeights(VectorXd::Zero(1));
  b.pi_expert = Policy::uniform(1, 2);
  b.provenance = describe("one_state_mdp(gamma=%g, tau=%g)", gamma, tau);
  return b;
}

EnvironmentBundle random_mdp(int n_states, int n_actions, std::uint64_t seed, double gamma,
                             double tau, double nu0_floor, double expert_mix) {
  if (n_states < 1 || n_actions < 1) {
    throw std::invalid_argument("random_mdp: state/action counts must be positive");
  }
  if (nu0_floor < 0.0 || nu0_floor > 1.0 / n_states) {
    throw std::invalid_argument("random_mdp: nu0_floor must lie in [0, 1/n_states]");
  }

  RngStream rng = RngStream(seed).child(0x7261);
  EnvironmentBundle b;
  b.mdp.n_states = n_states;
  b.mdp.n_actions = n_actions;
  b.mdp.discount = gamma;
  b.mdp.temperature = tau;
  b.mdp.transition.resize(n_states * n_actions, n_states);
  for (int sa = 0; sa < n_states * n_actions; ++sa) {
    fill_dirichlet(b.mdp.transition.data() + static_cast<std::ptrdiff_t>(sa) * n_states,
                   n_states, rng);
  }
  b.mdp.initial_dist.resize(n_states);
  fill_dirichlet(b.mdp.initial_dist.data(), n_states, rng);
  b.mdp.initial_dist =
      (nu0_floor + (1.0 - n_states * nu0_floor) * b.mdp.initial_dist.array()).matrix();

  // Random point on the L1 sphere: Dirichlet magnitudes with random signs.
  const int k = n_states * n_actions;
  VectorXd w(k);
  fill_dirichlet(w.data(), k, rng);
  for (int i = 0; i < k; ++i) {
    if (rng.next_double() < 0.5) w(i) = -w(i);
  }
  require_valid(b.mdp);
  b.phi = one_hot_sa_features(n_states, n_actions);
  b.w_true = RewardWeights(std::move(w));
  b.pi_expert = expert_for(b.mdp, *b.w_true, b.phi, expert_mix);
  b.provenance = describe(
      "random_mdp(n_states=%d, n_actions=%d, seed=%llu, gamma=%g, tau=%g, nu0_floor=%g, "
      "expert_mix=%g)",
      n_states, n_actions, static_cast<unsigned long long>(seed), gamma, tau, nu0_floor,
      expert_mix);
  return b;
}

EnvironmentBundle gridworld(int size, double slip_prob, double gamma, double tau,
                            double expert_mix) {
  if (size < 2) throw std::invalid_argument("gridworld: size must be >= 2");
  if (slip_prob < 0.0 || slip_prob >= 1.0) {
    throw std::invalid_argument("gridworld: slip_prob must lie in [0,1)");
  }
  const int S = size * size;
  const int A = 4;  // 0=up, 1=down, 2=left, 3=right

  auto move = [size](int s, int dir) {
    int row = s / size, col = s % size;
    switch (dir) {
      case 0: row = std::max(row - 1, 0); break;
      case 1: row = std::min(row + 1, size - 1); break;
      case 2: col = std::max(col - 1, 0); break;
      default: col = std::min(col + 1, size - 1); break;
    }
    return row * size + col;
  };

  EnvironmentBundle b;
  b.mdp.n_states = S;
  b.mdp.n_actions = A;
  b.mdp.discount = gamma;
  b.mdp.temperature = tau;
  b.mdp.transition = RowMatrixXd::Zero(S * A, S);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      const int row = s * A + a;
      b.mdp.transition(row, move(s, a)) += 1.0 - slip_prob;
      for (int d = 0; d < 4; ++d) {
        b.mdp.transition(row, move(s, d)) += slip_prob / 4.0;
      }
    }
  }
  b.mdp.initial_dist = VectorXd::Constant(S, 1.0 / S);

  require_valid(b.mdp);
  b.phi = one_hot_state_features(S, A);
  VectorXd w = VectorXd::Zero(S);
  w(S - 1) = 1.0;  // unit weight on the goal cell
  b.w_true = RewardWeights(std::move(w));
  b.pi_expert = expert_for(b.mdp, *b.w_true, b.phi, expert_mix);
  b.provenance = describe("gridworld(size=%d, slip_prob=%g, gamma=%g, tau=%g, expert_mix=%g)",
                          size, slip_prob, gamma, tau, expert_mix);
  return b;
}

}  // namespace softirl
