#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "softirl/environments.hpp"
#include "softirl/exact.hpp"

using namespace softirl;

namespace {

RewardTable constant_reward(int n_states, int n_actions, double value) {
  RewardTable r;
  r.values = RowMatrixXd::Constant(n_states, n_actions, value);
  return r;
}

}  // namespace

TEST_SUITE_BEGIN("exact_solver");

TEST_CASE("soft_value_iteration: one-state closed form") {
  // V = (r + tau log|A|)/(1-gamma) by symmetry; r = 1, gamma = .9, tau = 1.
  const Mdp m = one_state_mdp().mdp;
  const ValuePair vp = soft_value_iteration(m, constant_reward(1, 2, 1.0), 1e-10);
  const double v_expected = (1.0 + std::log(2.0)) / 0.1;
  CHECK(vp.v(0) == doctest::Approx(v_expected).epsilon(1e-9));
  CHECK(vp.v(0) == doctest::Approx(16.93147).epsilon(1e-5));
  CHECK(vp.q(0, 0) == doctest::Approx(1.0 + 0.9 * v_expected).epsilon(1e-9));
  CHECK(vp.q(0, 1) == doctest::Approx(16.23832).epsilon(1e-5));
  CHECK(vp.residual <= 1e-10);
}

TEST_CASE("soft_value_iteration: zero reward gives the entropy-only value") {
  RngStream rng(11);
  const Mdp m = oracles::random_mdp_raw(rng, 5, 3, 0.85, 0.7);
  const ValuePair vp = soft_value_iteration(m, constant_reward(5, 3, 0.0));
  const double expected = m.temperature * std::log(3.0) / (1.0 - m.discount);
  for (int s = 0; s < 5; ++s) {
    CHECK(vp.v(s) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("soft_value_iteration matches an independent fixed-point oracle") {
  RngStream rng(42);
  const Mdp m = oracles::random_mdp_raw(rng, 4, 2, 0.9, 1.0);
  const RewardTable r = oracles::random_reward(rng, 4, 2);
  const ValuePair vp = soft_value_iteration(m, r, 1e-10);
  const RowMatrixXd q_oracle = oracles::q_iteration(m, r, 1e-13);
  CHECK((vp.q - q_oracle).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("soft_value_iteration: V is softmax-consistent with Q") {
  RngStream rng(43);
  const Mdp m = oracles::random_mdp_raw(rng, 6, 3, 0.8, 0.4);
  const RewardTable r = oracles::random_reward(rng, 6, 3);
  const ValuePair vp = soft_value_iteration(m, r);
  for (int s = 0; s < 6; ++s) {
    const double lse = log_sum_exp_tau(vp.q.data() + s * 3, 3, m.temperature);
    CHECK(std::abs(vp.v(s) - lse) <= 1e-9);
  }
}

TEST_CASE("soft_value_iteration: residuals decay geometrically") {
  RngStream rng(44);
  const Mdp m = oracles::random_mdp_raw(rng, 5, 2, 0.9, 1.0);
  const RewardTable r = oracles::random_reward(rng, 5, 2);
  const ValuePair vp = soft_value_iteration(m, r);
  for (std::size_t i = 1; i < vp.residual_history.size(); ++i) {
    CHECK(vp.residual_history[i] <= m.discount * vp.residual_history[i - 1] + 1e-12);
  }
}

TEST_CASE("overflowing values exhaust the cap with residual history attached") {
  // A finite but astronomically large reward overflows the value recursion,
  // so the residual never clears the tolerance.
  const Mdp m = one_state_mdp().mdp;
  try {
    soft_value_iteration(m, constant_reward(1, 2, 1e308), 1e-10);
    FAIL("expected SolverFailure");
  } catch (const SolverFailure& e) {
    CHECK(e.residual_history.size() > 64);
    CHECK(!(e.residual_history.back() <= 1e-10));
  }
}

TEST_CASE("solvers reject tiny temperatures") {
  Mdp m = one_state_mdp().mdp;
  m.temperature = 1e-7;
  CHECK_THROWS_AS(soft_value_iteration(m, constant_reward(1, 2, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(policy_evaluation(m, constant_reward(1, 2, 0.0), Policy::uniform(1, 2)),
                  std::invalid_argument);
}

TEST_CASE("optimal_policy: softmax arithmetic and shift invariance") {
  ValuePair vp;
  vp.q.resize(1, 2);
  const double tau = 0.7;
  vp.q << tau * std::log(2.0), 0.0;
  Policy pi = optimal_policy(vp, tau);
  CHECK(pi.probs(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(pi.probs(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // Constant Q row -> uniform.
  vp.q << 3.3, 3.3;
  pi = optimal_policy(vp, tau);
  CHECK(pi.probs(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

  // Per-state shifts leave the policy unchanged.
  RngStream rng(5);
  ValuePair vp2;
  vp2.q.resize(3, 3);
  for (int i = 0; i < 9; ++i) vp2.q.data()[i] = 4.0 * rng.next_double() - 2.0;
  const Policy base = optimal_policy(vp2, tau);
  ValuePair shifted = vp2;
  for (int s = 0; s < 3; ++s) {
    shifted.q.row(s).array() += 1000.0 * (s + 1);
  }
  const Policy moved = optimal_policy(shifted, tau);
  CHECK((base.probs - moved.probs).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("policy_evaluation: one-state uniform closed form") {
  const Mdp m = one_state_mdp().mdp;
  const ValuePair vp =
      policy_evaluation(m, constant_reward(1, 2, 1.0), Policy::uniform(1, 2), 1e-10);
  const double expected = 1.0 + (0.9 / 0.1) * (1.0 + std::log(2.0));
  CHECK(vp.q(0, 0) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(vp.q(0, 1) == doctest::Approx(16.23832).epsilon(1e-5));
}

TEST_CASE("policy_evaluation of the optimal policy recovers Q*") {
  RngStream rng(46);
  const Mdp m = oracles::random_mdp_raw(rng, 4, 3, 0.9, 0.8);
  const RewardTable r = oracles::random_reward(rng, 4, 3);
  const double tol = 1e-10;
  const ValuePair star = soft_value_iteration(m, r, tol);
  const ValuePair eval = policy_evaluation(m, r, optimal_policy(star, m.temperature), tol);
  CHECK((star.q - eval.q).cwiseAbs().maxCoeff() <= 2 * tol);
}

TEST_CASE("policy_evaluation matches the linear-solve oracle") {
  RngStream rng(47);
  const Mdp m = oracles::random_mdp_raw(rng, 5, 3, 0.9, 1.0);
  const RewardTable r = oracles::random_reward(rng, 5, 3);
  const Policy pi = oracles::random_policy(rng, 5, 3);
  const ValuePair vp = policy_evaluation(m, r, pi, 1e-10);
  const VectorXd v_oracle = oracles::policy_evaluation_linear(m, r, pi);
  CHECK((vp.v - v_oracle).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("occupancy: one-state and point-mass lower bound") {
  const Mdp m = one_state_mdp().mdp;
  const OccupancyPair occ = occupancy(m, Policy::uniform(1, 2));
  CHECK(occ.nu(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(occ.mu(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(occ.mu(0, 1) == doctest::Approx(0.5).epsilon(1e-12));

  // nu(s) >= (1-gamma) nu0(s) on a random MDP with a point-mass start.
  RngStream rng(48);
  Mdp m2 = oracles::random_mdp_raw(rng, 4, 2, 0.9, 1.0);
  m2.initial_dist = VectorXd::Zero(4);
  m2.initial_dist(2) = 1.0;
  const Policy pi = oracles::random_policy(rng, 4, 2);
  CHECK(occupancy(m2, pi).nu(2) >= (1.0 - m2.discount) - 1e-12);
}

TEST_CASE("occupancy matches the truncated-series oracle and the flow constraints") {
  RngStream rng(49);
  const Mdp m = oracles::random_mdp_raw(rng, 6, 3, 0.9, 1.0);
  const Policy pi = oracles::random_policy(rng, 6, 3);
  const OccupancyPair occ = occupancy(m, pi);

  CHECK((occ.nu - oracles::occupancy_series(m, pi, 500)).lpNorm<Eigen::Infinity>() <= 1e-8);
  CHECK(std::abs(occ.nu.sum() - 1.0) <= 1e-9);
  CHECK(std::abs(occ.mu.sum() - 1.0) <= 1e-9);
  for (int s = 0; s < 6; ++s) {
    double inflow = 0.0;
    for (int sp = 0; sp < 6; ++sp) {
      for (int ap = 0; ap < 3; ++ap) {
        inflow += m.transition(m.sa_index(sp, ap), s) * occ.mu(sp, ap);
      }
    }
    CHECK(std::abs(occ.nu(s) - m.discount * inflow -
                   (1.0 - m.discount) * m.initial_dist(s)) <= 1e-9);
  }
}

TEST_CASE("feature_expectation_exact: constant and one-hot features") {
  const EnvironmentBundle b = one_state_mdp();
  const VectorXd sigma = feature_expectation_exact(b.mdp, Policy::uniform(1, 2), b.phi);
  CHECK(sigma(0) == doctest::Approx(10.0).epsilon(1e-10));

  // One-hot features unwind to mu/(1-gamma).
  RngStream rng(50);
  const Mdp m = oracles::random_mdp_raw(rng, 3, 2, 0.8, 1.0);
  const Policy pi = oracles::random_policy(rng, 3, 2);
  const FeatureMap phi = one_hot_sa_features(3, 2);
  const VectorXd sig = feature_expectation_exact(m, pi, phi);
  const OccupancyPair occ = occupancy(m, pi);
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 2; ++a) {
      CHECK(sig(s * 2 + a) ==
            doctest::Approx(occ.mu(s, a) / (1.0 - m.discount)).epsilon(1e-10));
    }
  }
}

TEST_CASE("feature expectations of uniform expert and deterministic comparator coincide "
          "under the constant feature") {
  const EnvironmentBundle b = one_state_mdp();
  Policy det;
  det.probs.resize(1, 2);
  det.probs << 0.0, 1.0;
  const VectorXd se = feature_expectation_exact(b.mdp, b.pi_expert, b.phi);
  const VectorXd sd = feature_expectation_exact(b.mdp, det, b.phi);
  CHECK((se - sd).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("objective_value: closed forms and consistency with V*") {
  const Mdp m = one_state_mdp().mdp;
  const double j = objective_value(m, constant_reward(1, 2, 1.0), Policy::uniform(1, 2));
  CHECK(j == doctest::Approx((1.0 + std::log(2.0)) / 0.1).epsilon(1e-10));

  // r = 0: J = tau * discounted causal entropy.
  RngStream rng(51);
  const Mdp m2 = oracles::random_mdp_raw(rng, 4, 3, 0.9, 0.6);
  const double j_uniform =
      objective_value(m2, constant_reward(4, 3, 0.0), Policy::uniform(4, 3));
  CHECK(j_uniform ==
        doctest::Approx(m2.temperature * std::log(3.0) / (1.0 - m2.discount)).epsilon(1e-9));

  // J^{pi*} = nu0 . V*.
  const RewardTable r = oracles::random_reward(rng, 4, 3);
  const ValuePair vp = soft_value_iteration(m2, r);
  const double lhs = objective_value(m2, r, optimal_policy(vp, m2.temperature));
  CHECK(std::abs(lhs - m2.initial_dist.dot(vp.v)) <= 1e-8);
}

TEST_CASE("soft_suboptimality: zero at the optimum and hand-computed one-state case") {
  RngStream rng(52);
  const Mdp m = oracles::random_mdp_raw(rng, 4, 2, 0.85, 0.9);
  const RewardTable r = oracles::random_reward(rng, 4, 2);
  const Policy pi_star = optimal_policy(soft_value_iteration(m, r), m.temperature);
  const SoftSubopt at_opt = soft_suboptimality(m, r, pi_star);
  CHECK(std::abs(at_opt.gap) <= 1e-8);
  CHECK(std::abs(at_opt.kl_form) <= 1e-8);

  // One-state, r = 0, pi = (0.9, 0.1): gap = 10 KL(pi || uniform).
  const Mdp one = one_state_mdp().mdp;
  Policy skew;
  skew.probs.resize(1, 2);
  skew.probs << 0.9, 0.1;
  const SoftSubopt s = soft_suboptimality(one, constant_reward(1, 2, 0.0), skew);
  const double kl = 0.9 * std::log(0.9 / 0.5) + 0.1 * std::log(0.1 / 0.5);
  CHECK(s.gap == doctest::Approx(10.0 * kl).epsilon(1e-8));
  CHECK(s.gap == doctest::Approx(3.680642).epsilon(1e-6));
  CHECK(std::abs(s.gap - s.kl_form) <= 1e-7);
}

TEST_CASE("soft_suboptimality: identity holds on random instances") {
  RngStream rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const int S = 2 + static_cast<int>(rng.next_u64() % 4);
    const int A = 2 + static_cast<int>(rng.next_u64() % 2);
    const Mdp m = oracles::random_mdp_raw(rng, S, A, 0.6 + 0.3 * rng.next_double(),
                                          0.4 + rng.next_double());
    const RewardTable r = oracles::random_reward(rng, S, A);
    const Policy pi = oracles::random_policy(rng, S, A);
    const SoftSubopt s = soft_suboptimality(m, r, pi);
    CHECK(std::abs(s.gap - s.kl_form) <= 1e-7);
  }
}

TEST_CASE("performance-difference identity on random policy pairs") {
  RngStream rng(54);
  for (int trial = 0; trial < 20; ++trial) {
    const Mdp m = oracles::random_mdp_raw(rng, 4, 2, 0.9, 0.8);
    const RewardTable r = oracles::random_reward(rng, 4, 2);
    const Policy pi1 = oracles::random_policy(rng, 4, 2);
    const Policy pi2 = oracles::random_policy(rng, 4, 2);

    const double lhs = objective_value(m, r, pi1) - objective_value(m, r, pi2);
    const ValuePair vp2 = policy_evaluation(m, r, pi2);
    const OccupancyPair occ1 = occupancy(m, pi1);
    double adv = 0.0, kl = 0.0;
    for (int s = 0; s < 4; ++s) {
      for (int a = 0; a < 2; ++a) {
        adv += occ1.mu(s, a) *
               (vp2.q(s, a) - vp2.v(s) - m.temperature * std::log(pi2.probs(s, a)));
      }
      kl += occ1.nu(s) * kl_nats(pi1.row(s), pi2.row(s), 2);
    }
    const double rhs = (adv - m.temperature * kl) / (1.0 - m.discount);
    CHECK(std::abs(lhs - rhs) <= 1e-7);
  }
}

TEST_CASE("distribution_mismatch: identical policies, one-state, and the nu0 bound") {
  const Mdp one = one_state_mdp().mdp;
  Policy det;
  det.probs.resize(1, 2);
  det.probs << 1.0, 0.0;
  CHECK(distribution_mismatch(one, Policy::uniform(1, 2), det) == doctest::Approx(1.0));

  RngStream rng(55);
  const Mdp m = oracles::random_mdp_raw(rng, 5, 2, 0.9, 1.0);
  const Policy pi = oracles::random_policy(rng, 5, 2);
  CHECK(distribution_mismatch(m, pi, pi) == doctest::Approx(1.0).epsilon(1e-12));

  const Policy ref = oracles::random_policy(rng, 5, 2);
  const double bound = 1.0 / ((1.0 - m.discount) * m.initial_dist.minCoeff());
  CHECK(distribution_mismatch(m, pi, ref) <= bound + 1e-9);
}

TEST_CASE("distribution_mismatch names the starved state") {
  // Absorbing state 0 unreachable from state 1's start.
  Mdp m;
  m.n_states = 2;
  m.n_actions = 1;
  m.discount = 0.9;
  m.temperature = 1.0;
  m.transition.resize(2, 2);
  m.transition << 1.0, 0.0, 0.0, 1.0;  // each state self-loops
  m.initial_dist.resize(2);
  m.initial_dist << 0.0, 1.0;
  const Policy pi = Policy::uniform(2, 1);
  CHECK_THROWS_WITH_AS(distribution_mismatch(m, pi, pi),
                       doctest::Contains("state 0"), std::domain_error);
}

TEST_SUITE_END();
