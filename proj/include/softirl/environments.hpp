#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "softirl/mdp.hpp"

namespace softirl {

/// An MDP together with its feature map and a ground-truth expert. When
/// w_true is present the expert is exactly soft-optimal for r_{w_true}
/// (mixed toward uniform when expert_mix > 0, which introduces
/// realizability error on purpose).
struct EnvironmentBundle {
  Mdp mdp;
  FeatureMap phi;
  std::optional<RewardWeights> w_true;
  Policy pi_expert;
  std::string provenance;
};

/// One-hot indicator features over state-action pairs, k = S*A.
FeatureMap one_hot_sa_features(int n_states, int n_actions);
/// One-hot indicator features over states, k = S.
FeatureMap one_hot_state_features(int n_states, int n_actions);
/// Constant scalar feature phi(s,a) = 1, k = 1.
FeatureMap constant_features(int n_states, int n_actions);

/// Single state, two self-loop actions, constant scalar feature, uniform
/// expert realizable with w_true = 0.
EnvironmentBundle one_state_mdp(double gamma = 0.9, double tau = 1.0);

/// Dirichlet-style random kernel and initial distribution (floored at
/// nu0_floor), random w_true on the L1 sphere, one-hot state-action
/// features, soft-optimal expert. Deterministic in seed.
EnvironmentBundle random_mdp(int n_states, int n_actions, std::uint64_t seed,
                             double gamma = 0.9, double tau = 1.0,
                             double nu0_floor = 0.0, double expert_mix = 0.0);

/// size x size grid, 4 move actions with slip probability toward a uniform
/// random direction, uniform initial distribution, one-hot state features,
/// w_true a unit weight on the last cell, soft-optimal expert.
EnvironmentBundle gridworld(int size, double slip_prob = 0.1, double gamma = 0.9,
                            double tau = 1.0, double expert_mix = 0.0);

}  // namespace softirl
