#include "softirl/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace softirl {

namespace {

int draw_horizon(RngStream& rng, double gamma, std::optional<int> cap) {
  int h = sample_geometric_horizon(rng, gamma);
  if (cap) h = std::min(h, *cap);  // biased once enabled; off by default
  return h;
}

}  // namespace

Trajectory rollout(const GenerativeModel& model, const Policy& pi, TrajectoryStart start,
                   int horizon, RngStream& rng) {
  if (horizon < 0) throw std::invalid_argument("rollout: horizon must be >= 0");
  if (pi.n_states() != model.n_states() || pi.n_actions() != model.n_actions()) {
    throw std::invalid_argument("rollout: policy shape does not match model");
  }

  Trajectory tr;
  tr.start = start;
  tr.steps.reserve(static_cast<std::size_t>(horizon) + 1);

  int s, a;
  if (start.kind == TrajectoryStart::Kind::FixedPair) {
    if (start.s < 0 || start.s >= model.n_states() || start.a < 0 ||
        start.a >= model.n_actions()) {
      throw std::invalid_argument("rollout: fixed start pair out of range");
    }
    s = start.s;
    a = start.a;
  } else {
    s = model.sample_initial(rng);
    a = rng.categorical(pi.row(s), pi.n_actions());
  }
  tr.steps.emplace_back(s, a);

  for (int h = 1; h <= horizon; ++h) {
    s = model.sample_next(s, a, rng);
    a = rng.categorical(pi.row(s), pi.n_actions());
    tr.steps.emplace_back(s, a);
  }
  model.record_samples(tr.steps.size());
  return tr;
}

double est_q(int s, int a, const Policy& pi, const RewardTable& r, int batch_size,
             const GenerativeModel& model, RngStream& rng, std::optional<int> horizon_cap) {
  if (batch_size < 1) throw std::invalid_argument("est_q: batch size must be >= 1");
  const double gamma = model.gamma();
  const double tau = model.tau();

  double acc = 0.0;
  for (int i = 0; i < batch_size; ++i) {
    RngStream traj_rng = rng.child(static_cast<std::uint64_t>(i));
    const int horizon = draw_horizon(traj_rng, gamma, horizon_cap);
    const Trajectory tr = rollout(model, pi, TrajectoryStart::fixed(s, a), horizon, traj_rng);
    double tail = 0.0;
    for (std::size_t h = 1; h < tr.steps.size(); ++h) {
      const auto [sh, ah] = tr.steps[h];
      tail += r.values(sh, ah) + tau * entropy_nats(pi.row(sh), pi.n_actions());
    }
    acc += tail;
  }
  return r.values(s, a) + acc / batch_size;
}

VectorXd est_sigma(const Policy& pi, const FeatureMap& phi, int batch_size,
                   const GenerativeModel& model, RngStream& rng,
                   std::optional<int> horizon_cap) {
  if (batch_size < 1) throw std::invalid_argument("est_sigma: batch size must be >= 1");
  if (phi.n_states != model.n_states() || phi.n_actions != model.n_actions()) {
    throw std::invalid_argument("est_sigma: feature map shape does not match model");
  }
  const double gamma = model.gamma();

  VectorXd acc = VectorXd::Zero(phi.k);
  for (int i = 0; i < batch_size; ++i) {
    RngStream traj_rng = rng.child(static_cast<std::uint64_t>(i));
    const int horizon = draw_horizon(traj_rng, gamma, horizon_cap);
    const Trajectory tr =
        rollout(model, pi, TrajectoryStart::from_initial(), horizon, traj_rng);
    for (const auto& [sh, ah] : tr.steps) {
      acc += phi.row(sh, ah).transpose();
    }
  }
  return acc / batch_size;
}

ExpertDataset generate_expert_dataset(const GenerativeModel& model, const Policy& pi_expert,
                                      int n, int horizon, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_expert_dataset: n must be >= 1");
  if (horizon < 1) throw std::invalid_argument("generate_expert_dataset: horizon must be >= 1");

  ExpertDataset out;
  out.n = n;
  out.horizon = horizon;
  out.seed = seed;
  out.trajectories.reserve(n);

  RngStream root(seed);
  for (int i = 0; i < n; ++i) {
    RngStream traj_rng = root.child(static_cast<std::uint64_t>(i));
    Trajectory tr =
        rollout(model, pi_expert, TrajectoryStart::from_initial(), horizon - 1, traj_rng);
    out.trajectories.push_back(std::move(tr.steps));
  }
  return out;
}

VectorXd empirical_expert_features(const ExpertDataset& data, const FeatureMap& phi,
                                   double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("empirical_expert_features: gamma must be in (0,1)");
  }
  VectorXd acc = VectorXd::Zero(phi.k);
  for (const auto& traj : data.trajectories) {
    double disc = 1.0;
    for (const auto& [s, a] : traj) {
      acc += disc * phi.row(s, a).transpose();
      disc *= gamma;
    }
  }
  return acc / static_cast<double>(data.trajectories.size());
}

}  // namespace softirl
