#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "softirl/mdp.hpp"
#include "softirl/rng.hpp"

namespace softirl {

/// Sample-based access to an MDP: initial states from nu0 and next states
/// from P(.|s,a). Implementations must be callable from parallel workers.
/// The built-in counter accumulates samples consumed, where one sample is
/// one state-action pair on a sampled trajectory.
class GenerativeModel {
 public:
  virtual ~GenerativeModel() = default;

  virtual int n_states() const = 0;
  virtual int n_actions() const = 0;
  virtual double gamma() const = 0;
  virtual double tau() const = 0;

  virtual int sample_initial(RngStream& rng) const = 0;
  virtual int sample_next(int s, int a, RngStream& rng) const = 0;

  void record_samples(std::uint64_t n) const { samples_.fetch_add(n, std::memory_order_relaxed); }
  std::uint64_t samples_consumed() const { return samples_.load(std::memory_order_relaxed); }

 private:
  mutable std::atomic<std::uint64_t> samples_{0};
};

/// Generative model backed by an explicit tabular MDP. Holds a reference;
/// the MDP must outlive the model.
class MdpGenerativeModel final : public GenerativeModel {
 public:
  explicit MdpGenerativeModel(const Mdp& m) : m_(m) {}

  int n_states() const override { return m_.n_states; }
  int n_actions() const override { return m_.n_actions; }
  double gamma() const override { return m_.discount; }
  double tau() const override { return m_.temperature; }

  int sample_initial(RngStream& rng) const override {
    return rng.categorical(m_.initial_dist.data(), m_.n_states);
  }
  int sample_next(int s, int a, RngStream& rng) const override {
    return rng.categorical(m_.transition_row(s, a), m_.n_states);
  }

  const Mdp& mdp() const { return m_; }

 private:
  const Mdp& m_;
};

struct TrajectoryStart {
  enum class Kind { FixedPair, InitialState };
  Kind kind = Kind::InitialState;
  int s = -1;
  int a = -1;

  static TrajectoryStart fixed(int s, int a) { return {Kind::FixedPair, s, a}; }
  static TrajectoryStart from_initial() { return {Kind::InitialState, -1, -1}; }
};

struct Trajectory {
  std::vector<std::pair<int, int>> steps;
  TrajectoryStart start;
};

/// Samples a trajectory of horizon+1 state-action pairs. In fixed mode the
/// first pair is the given (s,a) and the remaining `horizon` pairs follow
/// the policy; in initial mode all horizon+1 pairs follow the policy from
/// s0 ~ nu0. Adds the trajectory length to the model's sample counter.
Trajectory rollout(const GenerativeModel& model, const Policy& pi, TrajectoryStart start,
                   int horizon, RngStream& rng);

/// Unbiased Monte Carlo estimate of Q^pi_r(s,a): per trajectory, draw
/// H ~ Geom(1-gamma) and accumulate reward-plus-entropy terms over the H
/// pairs following the queried (s,a) (none when H = 0), so that each
/// successor pair at depth h carries inclusion probability gamma^h.
/// Returns r(s,a) plus the batch mean over B trajectories.
double est_q(int s, int a, const Policy& pi, const RewardTable& r, int batch_size,
             const GenerativeModel& model, RngStream& rng,
             std::optional<int> horizon_cap = std::nullopt);

/// Unbiased Monte Carlo estimate of the feature expectation sigma^pi:
/// batch mean over B trajectories of sum_{h=0}^{H} phi(s_h, a_h) with
/// s_0 ~ nu0 and H ~ Geom(1-gamma).
VectorXd est_sigma(const Policy& pi, const FeatureMap& phi, int batch_size,
                   const GenerativeModel& model, RngStream& rng,
                   std::optional<int> horizon_cap = std::nullopt);

/// N truncated expert demonstrations of exactly `horizon` pairs each.
struct ExpertDataset {
  std::vector<std::vector<std::pair<int, int>>> trajectories;
  int n = 0;
  int horizon = 0;
  std::uint64_t seed = 0;
};

ExpertDataset generate_expert_dataset(const GenerativeModel& model, const Policy& pi_expert,
                                      int n, int horizon, std::uint64_t seed);

/// Empirical expert feature expectation
/// (1/N) sum_i sum_{h<H} gamma^h phi(s_h^i, a_h^i).
VectorXd empirical_expert_features(const ExpertDataset& data, const FeatureMap& phi,
                                   double gamma);

}  // namespace softirl
