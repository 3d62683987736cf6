#include "setd/types.hpp"

#include <cmath>
#include <string>

namespace setd {
namespace {

void require_row_stochastic(const Matrix& m, const std::string& what) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double p = m(r, c);
      if (!std::isfinite(p) || p < 0.0) {
        throw ModelError(what + ": entry (" + std::to_string(r) + "," + std::to_string(c) +
                         ") is not a probability");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kStochasticTolerance) {
      throw ModelError(what + ": row " + std::to_string(r) + " sums to " + std::to_string(sum));
    }
  }
}

}  // namespace

TabularMDP::TabularMDP(std::vector<Matrix> transitions, Matrix reward, double gamma,
                       Matrix features, std::vector<bool> terminal, Vector start)
    : transitions_(std::move(transitions)),
      reward_(std::move(reward)),
      gamma_(gamma),
      features_(std::move(features)),
      terminal_(std::move(terminal)),
      start_(std::move(start)) {
  const auto n = reward_.rows();
  if (n < 1 || reward_.cols() < 1) throw ModelError("MDP needs at least one state and action");
  if (static_cast<Eigen::Index>(transitions_.size()) != reward_.cols()) {
    throw DimensionError("one transition matrix per action required");
  }
  if (!(gamma_ >= 0.0 && gamma_ <= 1.0)) throw ModelError("gamma must lie in [0, 1]");
  if (features_.rows() != n || features_.cols() < 1) {
    throw DimensionError("feature matrix must be |S| x d with d >= 1");
  }
  if (!features_.allFinite()) throw ModelError("features must be finite");
  if (!reward_.allFinite()) throw ModelError("rewards must be finite");
  if (static_cast<Eigen::Index>(terminal_.size()) != n) {
    throw DimensionError("terminal mask must have one entry per state");
  }
  if (start_.size() != n) throw DimensionError("start distribution must have |S| entries");

  for (std::size_t a = 0; a < transitions_.size(); ++a) {
    const Matrix& p = transitions_[a];
    if (p.rows() != n || p.cols() != n) {
      throw DimensionError("transition matrix of action " + std::to_string(a) + " is not |S|x|S|");
    }
    require_row_stochastic(p, "transition[" + std::to_string(a) + "]");
  }
  for (Eigen::Index s = 0; s < n; ++s) {
    if (!terminal_[s]) continue;
    for (std::size_t a = 0; a < transitions_.size(); ++a) {
      if (std::abs(transitions_[a](s, s) - 1.0) > kStochasticTolerance || reward_(s, a) != 0.0) {
        throw ModelError("terminal state " + std::to_string(s) +
                         " must self-loop with zero reward");
      }
    }
  }
  Matrix start_row = start_.transpose();
  require_row_stochastic(start_row, "start distribution");
  for (Eigen::Index s = 0; s < n; ++s) {
    if (terminal_[s] && start_(s) > 0.0) throw ModelError("episodes cannot start in a terminal state");
  }
}

bool TabularMDP::is_episodic() const {
  for (bool t : terminal_) {
    if (t) return true;
  }
  return false;
}

PolicyPair::PolicyPair(Matrix behavior, Matrix target)
    : behavior_(std::move(behavior)), target_(std::move(target)) {
  if (behavior_.rows() != target_.rows() || behavior_.cols() != target_.cols()) {
    throw DimensionError("behavior and target tables differ in shape");
  }
  require_row_stochastic(behavior_, "behavior policy");
  require_row_stochastic(target_, "target policy");
  for (Eigen::Index s = 0; s < target_.rows(); ++s) {
    for (Eigen::Index a = 0; a < target_.cols(); ++a) {
      if (target_(s, a) > 0.0 && behavior_(s, a) <= 0.0) {
        throw CoverageError("target acts at (" + std::to_string(s) + "," + std::to_string(a) +
                            ") where behavior has zero probability");
      }
    }
  }
}

void PolicyPair::check_compatible(const TabularMDP& mdp) const {
  if (behavior_.rows() != mdp.n_states() || behavior_.cols() != mdp.n_actions()) {
    throw DimensionError("policy tables do not match the MDP's |S| x |A|");
  }
}

double importance_ratio(const PolicyPair& policies, StateIndex s, ActionIndex a) {
  const double b = policies.behavior(s, a);
  if (b <= 0.0) {
    throw CoverageError("behavior probability is zero at (" + std::to_string(s) + "," +
                        std::to_string(a) + ")");
  }
  return policies.target(s, a) / b;
}

double value_estimate(const Vector& theta, const FeatureVector& phi) {
  if (theta.size() != phi.size()) {
    throw DimensionError("theta has length " + std::to_string(theta.size()) + ", phi has " +
                         std::to_string(phi.size()));
  }
  return phi.dot(theta);
}

Matrix policy_transition(const TabularMDP& mdp, const Matrix& policy) {
  const int n = mdp.n_states();
  Matrix p = Matrix::Zero(n, n);
  for (int a = 0; a < mdp.n_actions(); ++a) {
    p += policy.col(a).asDiagonal() * mdp.transition(a);
  }
  return p;
}

Vector policy_reward(const TabularMDP& mdp, const Matrix& policy) {
  return policy.cwiseProduct(mdp.reward()).rowwise().sum();
}

}  // namespace setd
