#include <doctest.h>

#include <cmath>

#include "softirl/environments.hpp"
#include "softirl/mdp.hpp"
#include "softirl/rng.hpp"

using namespace softirl;

TEST_SUITE_BEGIN("mdp_core");

TEST_CASE("reward_of: basis weight against one-hot features selects one pair") {
  const FeatureMap phi = one_hot_sa_features(2, 2);
  VectorXd w = VectorXd::Zero(4);
  w(1) = 1.0;  // pair (s=0, a=1)
  const RewardTable r = reward_of(RewardWeights(w), phi);
  CHECK(r.values(0, 1) == 1.0);
  CHECK(r.values(0, 0) == 0.0);
  CHECK(r.values(1, 0) == 0.0);
  CHECK(r.values(1, 1) == 0.0);
}

TEST_CASE("reward_of: zero weights give the zero reward") {
  const FeatureMap phi = one_hot_sa_features(3, 2);
  const RewardTable r = reward_of(RewardWeights(VectorXd::Zero(6)), phi);
  CHECK(r.max_abs() == 0.0);
}

TEST_CASE("reward_of: constant scalar feature with unit weight gives r = 1") {
  const FeatureMap phi = constant_features(2, 3);
  const RewardTable r = reward_of(RewardWeights(VectorXd::Ones(1)), phi);
  CHECK(r.values.minCoeff() == 1.0);
  CHECK(r.values.maxCoeff() == 1.0);
}

TEST_CASE("reward_of: dimension mismatch is rejected") {
  const FeatureMap phi = one_hot_sa_features(2, 2);
  CHECK_THROWS_AS(reward_of(RewardWeights(VectorXd::Zero(3)), phi), std::invalid_argument);
}

TEST_CASE("reward_of is linear and bounded by the feature sup norm") {
  RngStream rng(7);
  RowMatrixXd values(6, 3);
  for (int i = 0; i < values.size(); ++i) values.data()[i] = 2.0 * rng.next_double() - 1.0;
  const FeatureMap phi(3, 2, values);

  for (int trial = 0; trial < 50; ++trial) {
    VectorXd w1(3), w2(3);
    for (int i = 0; i < 3; ++i) {
      w1(i) = (2.0 * rng.next_double() - 1.0) / 3.0;
      w2(i) = (2.0 * rng.next_double() - 1.0) / 3.0;
    }
    const double alpha = rng.next_double(), beta = 1.0 - alpha;
    const RewardTable lhs = reward_of(RewardWeights(alpha * w1 + beta * w2), phi);
    const RowMatrixXd rhs = alpha * reward_of(RewardWeights(w1), phi).values +
                            beta * reward_of(RewardWeights(w2), phi).values;
    CHECK((lhs.values - rhs).cwiseAbs().maxCoeff() <= 1e-14);

    // Hoelder: |<w, phi>| <= ||w||_1 ||phi||_inf for w in W.
    const VectorXd w_ball = w1 / std::max(w1.lpNorm<1>(), 1.0);
    CHECK(reward_of(RewardWeights(w_ball), phi).max_abs() <= phi.sup_norm + 1e-15);
  }
}

TEST_CASE("shannon_entropy: uniform, point mass, and a hand-computed case") {
  VectorXd uniform2(2);
  uniform2 << 0.5, 0.5;
  CHECK(shannon_entropy(uniform2) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  VectorXd point(3);
  point << 0.0, 1.0, 0.0;
  CHECK(shannon_entropy(point) == 0.0);

  VectorXd p(2);
  p << 0.25, 0.75;
  const double expected = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75));
  CHECK(shannon_entropy(p) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(shannon_entropy(p) == doctest::Approx(0.562335).epsilon(1e-5));
}

TEST_CASE("shannon_entropy: bounds 0 <= H <= log(dim) on random distributions") {
  RngStream rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 6);
    VectorXd p(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      p(i) = -std::log(rng.next_open_double());
      sum += p(i);
    }
    p /= sum;
    const double h = shannon_entropy(p);
    CHECK(h >= 0.0);
    CHECK(h <= std::log(static_cast<double>(n)) + 1e-12);
  }
}

TEST_CASE("shannon_entropy: invalid distributions are rejected") {
  VectorXd negative(2);
  negative << 1.2, -0.2;
  CHECK_THROWS_AS(shannon_entropy(negative), std::invalid_argument);
  VectorXd off_sum(2);
  off_sum << 0.5, 0.4;
  CHECK_THROWS_AS(shannon_entropy(off_sum), std::invalid_argument);
}

TEST_CASE("validate_mdp: well-formed one-state MDP has an empty report") {
  const EnvironmentBundle b = one_state_mdp();
  CHECK(validate_mdp(b.mdp).ok());
}

TEST_CASE("validate_mdp: deficient transition row is named with its deficit") {
  Mdp m = one_state_mdp().mdp;
  m.transition(1, 0) = 0.9;
  const ValidationReport rep = validate_mdp(m);
  REQUIRE(!rep.ok());
  CHECK(rep.to_string().find("(s=0,a=1)") != std::string::npos);
  CHECK(rep.to_string().find("0.9") != std::string::npos);
}

TEST_CASE("validate_mdp: gamma = 1 is flagged as out of range") {
  Mdp m = one_state_mdp().mdp;
  m.discount = 1.0;
  const ValidationReport rep = validate_mdp(m);
  REQUIRE(!rep.ok());
  CHECK(rep.to_string().find("discount") != std::string::npos);
}

TEST_CASE("RewardWeights enforces the L1 ball") {
  VectorXd big(2);
  big << 0.8, 0.4;
  CHECK_THROWS_AS(RewardWeights{big}, std::invalid_argument);
  VectorXd ok(2);
  ok << 0.8, 0.2;
  CHECK_NOTHROW(RewardWeights{ok});
}

TEST_CASE("FeatureMap caches the exact sup norm and rejects non-finite input") {
  RowMatrixXd values(4, 2);
  values << 0.0, -3.0, 1.0, 2.0, 0.5, -0.5, 0.25, 0.0;
  const FeatureMap phi(2, 2, values);
  CHECK(phi.sup_norm == values.cwiseAbs().maxCoeff());

  values(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(FeatureMap(2, 2, values), std::invalid_argument);
}

TEST_SUITE_END();
