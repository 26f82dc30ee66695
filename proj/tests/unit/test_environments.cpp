#include <doctest.h>

#include <cmath>

#include "softirl/environments.hpp"
#include "softirl/exact.hpp"
#include "softirl/metrics.hpp"

using namespace softirl;

namespace {

// Realizability: the bundled expert is the soft-optimal policy of r_{w_true}.
void check_realizable(const EnvironmentBundle& b) {
  REQUIRE(b.w_true.has_value());
  const RewardTable r = reward_of(*b.w_true, b.phi);
  const Policy pi_star = optimal_policy(soft_value_iteration(b.mdp, r), b.mdp.temperature);
  CHECK((b.pi_expert.probs - pi_star.probs).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(expert_suboptimality(b.mdp, r, b.pi_expert) <= 1e-8);
}

}  // namespace

TEST_SUITE_BEGIN("environments");

TEST_CASE("one_state_mdp: shapes, expert, validity") {
  const EnvironmentBundle b = one_state_mdp();
  CHECK(b.mdp.n_states == 1);
  CHECK(b.mdp.n_actions == 2);
  CHECK(b.pi_expert.probs(0, 0) == 0.5);
  CHECK(b.phi.k == 1);
  CHECK(validate_mdp(b.mdp).ok());
  check_realizable(b);
}

TEST_CASE("random_mdp: determinism, validity, realizable expert") {
  const EnvironmentBundle b1 = random_mdp(5, 3, 123, 0.9, 1.0, 0.05);
  const EnvironmentBundle b2 = random_mdp(5, 3, 123, 0.9, 1.0, 0.05);
  CHECK((b1.mdp.transition - b2.mdp.transition).cwiseAbs().maxCoeff() == 0.0);
  CHECK((b1.pi_expert.probs - b2.pi_expert.probs).cwiseAbs().maxCoeff() == 0.0);
  CHECK((b1.w_true->w - b2.w_true->w).lpNorm<Eigen::Infinity>() == 0.0);

  CHECK(validate_mdp(b1.mdp).ok());
  CHECK(b1.w_true->w.lpNorm<1>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b1.mdp.initial_dist.minCoeff() >= 0.05);
  check_realizable(b1);

  const EnvironmentBundle other = random_mdp(5, 3, 124, 0.9, 1.0, 0.05);
  CHECK((b1.mdp.transition - other.mdp.transition).cwiseAbs().maxCoeff() > 0.0);

  CHECK_THROWS_AS(random_mdp(5, 3, 1, 0.9, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("random_mdp: expert_mix creates a misspecified expert") {
  const EnvironmentBundle b = random_mdp(4, 2, 9, 0.9, 1.0, 0.1, 0.3);
  const RewardTable r = reward_of(*b.w_true, b.phi);
  CHECK(expert_suboptimality(b.mdp, r, b.pi_expert) > 1e-6);
}

TEST_CASE("gridworld: geometry, slip, validity, assumptions") {
  const EnvironmentBundle b = gridworld(3, 0.0);
  CHECK(b.mdp.n_states == 9);
  CHECK(b.mdp.n_actions == 4);
  CHECK(validate_mdp(b.mdp).ok());
  // Moving right from the center cell is deterministic without slip.
  const int center = 4;
  CHECK(b.mdp.transition(b.mdp.sa_index(center, 3), 5) == 1.0);
  check_realizable(b);

  const EnvironmentBundle slippery = gridworld(4, 0.2);
  CHECK(validate_mdp(slippery.mdp).ok());
  check_realizable(slippery);
  // Assumption 3 holds under the uniform initial distribution.
  CHECK(occupancy(slippery.mdp, slippery.pi_expert).nu.minCoeff() > 0.0);
  // Assumption 1 witness: finite mismatch for an arbitrary policy pair.
  const Policy uniform = Policy::uniform(16, 4);
  CHECK(std::isfinite(distribution_mismatch(slippery.mdp, uniform, slippery.pi_expert)));

  CHECK_THROWS_AS(gridworld(1), std::invalid_argument);
  CHECK_THROWS_AS(gridworld(3, 1.0), std::invalid_argument);
}

TEST_CASE("feature constructors cover the three reward regimes") {
  const FeatureMap sa = one_hot_sa_features(3, 2);
  CHECK(sa.k == 6);
  CHECK(sa.sup_norm == 1.0);
  const FeatureMap st = one_hot_state_features(3, 2);
  CHECK(st.k == 3);
  CHECK(st.row(2, 1)(2) == 1.0);
  CHECK(st.row(2, 1).sum() == 1.0);
  const FeatureMap c = constant_features(3, 2);
  CHECK(c.k == 1);
  CHECK(c.values.minCoeff() == 1.0);
}

TEST_SUITE_END();
