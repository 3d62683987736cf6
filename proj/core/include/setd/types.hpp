#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "setd/errors.hpp"

namespace setd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Feature activations of one state, length d.
using FeatureVector = Eigen::VectorXd;

using StateIndex = int;
using ActionIndex = int;

inline constexpr double kStochasticTolerance = 1e-12;

// Finite MDP with linear features. Immutable once constructed; the
// constructor validates every invariant and throws ModelError otherwise.
class TabularMDP {
 public:
  // transitions[a] is the |S|x|S| row-stochastic matrix of action a,
  // reward is |S|x|A|, features is |S|xd. terminal[s] marks absorbing
  // states (self-loop, zero reward). start is the episode start / initial
  // state distribution.
  TabularMDP(std::vector<Matrix> transitions, Matrix reward, double gamma,
             Matrix features, std::vector<bool> terminal, Vector start);

  int n_states() const { return static_cast<int>(reward_.rows()); }
  int n_actions() const { return static_cast<int>(reward_.cols()); }
  int n_features() const { return static_cast<int>(features_.cols()); }

  const Matrix& transition(ActionIndex a) const { return transitions_.at(a); }
  const std::vector<Matrix>& transitions() const { return transitions_; }
  const Matrix& reward() const { return reward_; }
  double reward(StateIndex s, ActionIndex a) const { return reward_(s, a); }
  double gamma() const { return gamma_; }
  const Matrix& features() const { return features_; }
  FeatureVector feature(StateIndex s) const { return features_.row(s).transpose(); }
  bool is_terminal(StateIndex s) const { return terminal_.at(s); }
  const std::vector<bool>& terminal_mask() const { return terminal_; }
  bool is_episodic() const;
  const Vector& start_distribution() const { return start_; }

 private:
  std::vector<Matrix> transitions_;
  Matrix reward_;
  double gamma_;
  Matrix features_;
  std::vector<bool> terminal_;
  Vector start_;
};

// Behavior policy (data generating) and target policy (evaluated), both
// |S|x|A| row-stochastic tables.
class PolicyPair {
 public:
  PolicyPair(Matrix behavior, Matrix target);

  const Matrix& behavior() const { return behavior_; }
  const Matrix& target() const { return target_; }
  double behavior(StateIndex s, ActionIndex a) const { return behavior_(s, a); }
  double target(StateIndex s, ActionIndex a) const { return target_(s, a); }
  bool on_policy() const { return behavior_ == target_; }

  // Throws DimensionError when the tables do not match the MDP's |S|x|A|.
  void check_compatible(const TabularMDP& mdp) const;

 private:
  Matrix behavior_;
  Matrix target_;
};

// One experience tuple. phi_next is all-zeros when next_state is terminal.
struct TransitionSample {
  FeatureVector phi;
  double reward = 0.0;
  FeatureVector phi_next;
  double rho = 1.0;
  StateIndex state = 0;
  ActionIndex action = 0;
  StateIndex next_state = 0;
  bool episode_end = false;
};

// pi(a|s) / pi_b(a|s). Throws CoverageError when pi_b(a|s) == 0.
double importance_ratio(const PolicyPair& policies, StateIndex s, ActionIndex a);

// phi^T theta. Throws DimensionError on length mismatch.
double value_estimate(const Vector& theta, const FeatureVector& phi);

// Policy-averaged transition matrix sum_a pi(a|s) P^a(s, .).
Matrix policy_transition(const TabularMDP& mdp, const Matrix& policy);

// Policy-averaged reward sum_a pi(a|s) R(s, a).
Vector policy_reward(const TabularMDP& mdp, const Matrix& policy);

}  // namespace setd
