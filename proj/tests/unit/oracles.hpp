#pragma once

// Test-side oracles, kept independent of the implementation paths they
// check: value functions via fixed-point iteration on Q, policy evaluation
// via a dense linear solve, occupancies via a truncated power series.

#include <Eigen/Dense>

#include <cmath>

#include "softirl/mdp.hpp"
#include "softirl/rng.hpp"

namespace oracles {

using softirl::Mdp;
using softirl::Policy;
using softirl::RewardTable;
using softirl::RowMatrixXd;
using softirl::VectorXd;

// Optimal Q by iterating Q <- r + gamma P (tau log sum exp(Q/tau)) to a
// sup-norm change below tol.
inline RowMatrixXd q_iteration(const Mdp& m, const RewardTable& r, double tol = 1e-13) {
  const int S = m.n_states, A = m.n_actions;
  RowMatrixXd q = RowMatrixXd::Zero(S, A);
  RowMatrixXd next(S, A);
  for (int sweep = 0; sweep < 2'000'000; ++sweep) {
    VectorXd v(S);
    for (int s = 0; s < S; ++s) {
      const double mx = q.row(s).maxCoeff();
      double z = 0.0;
      for (int a = 0; a < A; ++a) z += std::exp((q(s, a) - mx) / m.temperature);
      v(s) = mx + m.temperature * std::log(z);
    }
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        double ev = 0.0;
        const double* row = m.transition_row(s, a);
        for (int sp = 0; sp < S; ++sp) ev += row[sp] * v(sp);
        next(s, a) = r.values(s, a) + m.discount * ev;
      }
    }
    const double change = (next - q).cwiseAbs().maxCoeff();
    q = next;
    if (change <= tol) break;
  }
  return q;
}

// V^pi from the linear system V = c + gamma P^pi V with
// c(s) = sum_a pi(a|s) (r(s,a) - tau log pi(a|s)).
inline VectorXd policy_evaluation_linear(const Mdp& m, const RewardTable& r, const Policy& pi) {
  const int S = m.n_states, A = m.n_actions;
  Eigen::MatrixXd p_pi = Eigen::MatrixXd::Zero(S, S);
  VectorXd c = VectorXd::Zero(S);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      const double p = pi.probs(s, a);
      if (p == 0.0) continue;
      c(s) += p * (r.values(s, a) - m.temperature * std::log(p));
      const double* row = m.transition_row(s, a);
      for (int sp = 0; sp < S; ++sp) p_pi(s, sp) += p * row[sp];
    }
  }
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(S, S) - m.discount * p_pi;
  return lhs.partialPivLu().solve(c);
}

// State occupancy from the truncated series (1-gamma) sum_h gamma^h nu_h,
// normalized at the truncation horizon.
inline VectorXd occupancy_series(const Mdp& m, const Policy& pi, int horizon = 500) {
  const int S = m.n_states, A = m.n_actions;
  Eigen::MatrixXd p_pi = Eigen::MatrixXd::Zero(S, S);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      const double p = pi.probs(s, a);
      const double* row = m.transition_row(s, a);
      for (int sp = 0; sp < S; ++sp) p_pi(s, sp) += p * row[sp];
    }
  }
  VectorXd dist = m.initial_dist;
  VectorXd acc = VectorXd::Zero(S);
  double disc = 1.0;
  double mass = 0.0;
  for (int h = 0; h <= horizon; ++h) {
    acc += disc * dist;
    mass += disc;
    dist = p_pi.transpose() * dist;
    disc *= m.discount;
  }
  return acc / mass;
}

inline Policy random_policy(softirl::RngStream& rng, int n_states, int n_actions) {
  Policy pi;
  pi.probs.resize(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    double sum = 0.0;
    for (int a = 0; a < n_actions; ++a) {
      pi.probs(s, a) = -std::log(rng.next_open_double());
      sum += pi.probs(s, a);
    }
    pi.probs.row(s) /= sum;
  }
  return pi;
}

inline Mdp random_mdp_raw(softirl::RngStream& rng, int n_states, int n_actions, double gamma,
                          double tau) {
  Mdp m;
  m.n_states = n_states;
  m.n_actions = n_actions;
  m.discount = gamma;
  m.temperature = tau;
  m.transition.resize(n_states * n_actions, n_states);
  for (int sa = 0; sa < n_states * n_actions; ++sa) {
    double sum = 0.0;
    for (int sp = 0; sp < n_states; ++sp) {
      m.transition(sa, sp) = -std::log(rng.next_open_double());
      sum += m.transition(sa, sp);
    }
    m.transition.row(sa) /= sum;
  }
  m.initial_dist.resize(n_states);
  double sum = 0.0;
  for (int s = 0; s < n_states; ++s) {
    m.initial_dist(s) = -std::log(rng.next_open_double());
    sum += m.initial_dist(s);
  }
  m.initial_dist /= sum;
  return m;
}

inline RewardTable random_reward(softirl::RngStream& rng, int n_states, int n_actions) {
  RewardTable r;
  r.values.resize(n_states, n_actions);
  for (int i = 0; i < r.values.size(); ++i) {
    r.values.data()[i] = 2.0 * rng.next_double() - 1.0;
  }
  return r;
}

}  // namespace oracles
