#include "softirl/mdp.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace softirl {

namespace {

std::string fmt(const char* format, ...) {
  char buf[256];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return std::string(buf);
}

// Appends a message when `row` (length n) fails to be a probability vector.
void check_prob_row(const double* row, int n, const std::string& what,
                    std::vector<std::string>& out) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(row[i])) {
      out.push_back(what + fmt(" has non-finite entry at index %d", i));
      return;
    }
    if (row[i] < 0.0) {
      out.push_back(what + fmt(" has negative entry %.3g at index %d", row[i], i));
    }
    sum += row[i];
  }
  if (std::abs(sum - 1.0) > kProbTol) {
    out.push_back(what + fmt(" sums to %.17g (deficit %.3g)", sum, 1.0 - sum));
  }
}

}  // namespace

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i];
  }
  return os.str();
}

ValidationReport validate_mdp(const Mdp& m) {
  ValidationReport rep;
  auto& v = rep.violations;
  if (m.n_states <= 0) v.push_back(fmt("n_states must be positive (got %d)", m.n_states));
  if (m.n_actions <= 0) v.push_back(fmt("n_actions must be positive (got %d)", m.n_actions));
  if (!rep.ok()) return rep;

  if (m.transition.rows() != static_cast<Eigen::Index>(m.n_states) * m.n_actions ||
      m.transition.cols() != m.n_states) {
    v.push_back(fmt("transition has shape %ldx%ld, expected %dx%d",
                    static_cast<long>(m.transition.rows()),
                    static_cast<long>(m.transition.cols()),
                    m.n_states * m.n_actions, m.n_states));
    return rep;
  }
  if (m.initial_dist.size() != m.n_states) {
    v.push_back(fmt("initial_dist has length %ld, expected %d",
                    static_cast<long>(m.initial_dist.size()), m.n_states));
    return rep;
  }

  for (int s = 0; s < m.n_states; ++s) {
    for (int a = 0; a < m.n_actions; ++a) {
      check_prob_row(m.transition_row(s, a), m.n_states,
                     fmt("transition row (s=%d,a=%d)", s, a), v);
    }
  }
  check_prob_row(m.initial_dist.data(), m.n_states, "initial_dist", v);

  if (!(m.discount > 0.0 && m.discount < 1.0)) {
    v.push_back(fmt("discount %.17g out of range (0,1)", m.discount));
  }
  if (!(m.temperature > 0.0)) {
    v.push_back(fmt("temperature %.17g must be > 0", m.temperature));
  }
  return rep;
}

const Mdp& require_valid(const Mdp& m) {
  ValidationReport rep = validate_mdp(m);
  if (!rep.ok()) throw std::invalid_argument("invalid MDP: " + rep.to_string());
  return m;
}

FeatureMap::FeatureMap(int n_states_in, int n_actions_in, RowMatrixXd values_in)
    : n_states(n_states_in), n_actions(n_actions_in), values(std::move(values_in)) {
  if (n_states <= 0 || n_actions <= 0) {
    throw std::invalid_argument("FeatureMap: state/action counts must be positive");
  }
  if (values.rows() != static_cast<Eigen::Index>(n_states) * n_actions || values.cols() < 1) {
    throw std::invalid_argument("FeatureMap: values must have n_states*n_actions rows and k >= 1 columns");
  }
  if (!values.allFinite()) {
    throw std::invalid_argument("FeatureMap: all entries must be finite");
  }
  k = static_cast<int>(values.cols());
  sup_norm = values.cwiseAbs().maxCoeff();
}

RewardWeights::RewardWeights(VectorXd w_in) : w(std::move(w_in)) {
  if (w.size() == 0) throw std::invalid_argument("RewardWeights: empty vector");
  if (!w.allFinite()) throw std::invalid_argument("RewardWeights: non-finite entry");
  const double l1 = w.lpNorm<1>();
  if (l1 > 1.0 + kWeightTol) {
    throw std::invalid_argument("RewardWeights: ||w||_1 = " + std::to_string(l1) +
                                " exceeds the unit L1 ball");
  }
}

Policy Policy::uniform(int n_states, int n_actions) {
  Policy pi;
  pi.probs = RowMatrixXd::Constant(n_states, n_actions, 1.0 / n_actions);
  return pi;
}

void check_policy(const Policy& pi) {
  std::vector<std::string> v;
  for (int s = 0; s < pi.n_states(); ++s) {
    check_prob_row(pi.row(s), pi.n_actions(),
                   "policy row (s=" + std::to_string(s) + ")", v);
  }
  if (!v.empty()) {
    ValidationReport rep{std::move(v)};
    throw std::invalid_argument("invalid policy: " + rep.to_string());
  }
}

RewardTable reward_of(const RewardWeights& w, const FeatureMap& phi) {
  if (w.k() != phi.k) {
    throw std::invalid_argument("reward_of: weight dimension " + std::to_string(w.k()) +
                                " does not match feature dimension " + std::to_string(phi.k));
  }
  RewardTable r;
  r.values.resize(phi.n_states, phi.n_actions);
  Eigen::Map<VectorXd>(r.values.data(), r.values.size()) = phi.values * w.w;
  return r;
}

double entropy_nats(const double* p, int n) {
  double h = 0.0;
  for (int i = 0; i < n; ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  }
  return h;
}

double kl_nats(const double* p, const double* q, int n) {
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    if (p[i] > 0.0) {
      if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
      d += p[i] * std::log(p[i] / q[i]);
    }
  }
  return d;
}

double shannon_entropy(const VectorXd& dist) {
  std::vector<std::string> v;
  check_prob_row(dist.data(), static_cast<int>(dist.size()), "distribution", v);
  if (!v.empty()) {
    ValidationReport rep{std::move(v)};
    throw std::invalid_argument("shannon_entropy: " + rep.to_string());
  }
  return entropy_nats(dist.data(), static_cast<int>(dist.size()));
}

}  // namespace softirl
