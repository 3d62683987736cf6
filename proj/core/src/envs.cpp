#include "setd/envs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "setd/analysis.hpp"

namespace setd {

std::string_view to_string(SamplingMode mode) {
  return mode == SamplingMode::kSequential ? "sequential" : "iid";
}

SamplingMode parse_sampling_mode(std::string_view text) {
  if (text == "sequential") return SamplingMode::kSequential;
  if (text == "iid") return SamplingMode::kIid;
  throw ConfigError("unknown sampling mode '" + std::string(text) + "'");
}

Environment build_two_state() {
  Matrix left{{1.0, 0.0}, {1.0, 0.0}};
  Matrix right{{0.0, 1.0}, {0.0, 1.0}};
  Matrix features{{1.0}, {2.0}};
  TabularMDP mdp({left, right}, Matrix::Zero(2, 2), 0.9, features, {false, false},
                 Vector::Constant(2, 0.5));
  Matrix behavior = Matrix::Constant(2, 2, 0.5);
  Matrix target{{0.0, 1.0}, {0.0, 1.0}};
  return {std::move(mdp), PolicyPair(behavior, target)};
}

Environment build_boyan() {
  constexpr int kStates = 14;
  constexpr int kFeatures = 4;

  Matrix p = Matrix::Zero(kStates, kStates);
  Matrix reward = Matrix::Zero(kStates, 1);
  p(0, 0) = 1.0;
  p(1, 0) = 1.0;
  reward(1, 0) = -2.0;
  for (int i = 2; i < kStates; ++i) {
    p(i, i - 1) = 0.5;
    p(i, i - 2) = 0.5;
    reward(i, 0) = -3.0;
  }

  // phi_j(s_i) = max(0, 1 - |i - c_j| / h) with c_j = 13 - j * 13/3 and
  // h = 13/3, evaluated in thirds so anchors land exactly on s0 and s13.
  Matrix features(kStates, kFeatures);
  for (int i = 0; i < kStates; ++i) {
    for (int j = 0; j < kFeatures; ++j) {
      const int thirds_from_anchor = std::abs(3 * i - 13 * (3 - j));
      features(i, j) = std::max(0.0, 1.0 - thirds_from_anchor / 13.0);
    }
  }

  std::vector<bool> terminal(kStates, false);
  terminal[0] = true;
  Vector start = Vector::Zero(kStates);
  start(kStates - 1) = 1.0;

  TabularMDP mdp({p}, reward, 1.0, features, terminal, start);
  Matrix policy = Matrix::Ones(kStates, 1);
  return {std::move(mdp), PolicyPair(policy, policy)};
}

Environment build_baird() {
  constexpr int kStates = 7;
  constexpr int kFeatures = 8;
  Matrix dashed = Matrix::Zero(kStates, kStates);
  dashed.leftCols(6).setConstant(1.0 / 6.0);
  Matrix solid = Matrix::Zero(kStates, kStates);
  solid.col(6).setOnes();

  Matrix features = Matrix::Zero(kStates, kFeatures);
  for (int i = 0; i < 6; ++i) {
    features(i, i) = 2.0;
    features(i, 7) = 1.0;
  }
  features(6, 6) = 1.0;
  features(6, 7) = 2.0;

  TabularMDP mdp({dashed, solid}, Matrix::Zero(kStates, 2), 0.99, features,
                 std::vector<bool>(kStates, false), Vector::Constant(kStates, 1.0 / kStates));
  Matrix behavior(kStates, 2);
  behavior.col(0).setConstant(6.0 / 7.0);
  behavior.col(1).setConstant(1.0 / 7.0);
  Matrix target(kStates, 2);
  target.col(0).setZero();
  target.col(1).setOnes();
  return {std::move(mdp), PolicyPair(behavior, target)};
}

Vector baird_initial_theta() {
  Vector theta = Vector::Ones(8);
  theta(6) = 10.0;
  return theta;
}

namespace {

Matrix random_stochastic_rows(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform() + 1e-5;
    m.row(r) /= m.row(r).sum();
  }
  return m;
}

}  // namespace

Environment build_random_mdp(int n_states, int n_actions, int d, std::uint64_t seed) {
  if (n_states < 2 || n_actions < 1 || d < 2) {
    throw ModelError("random MDP needs n_states >= 2, n_actions >= 1, d >= 2");
  }
  Rng rng = Rng::for_stream(seed, StreamPurpose::kEnvironment);
  std::vector<Matrix> transitions;
  transitions.reserve(n_actions);
  for (int a = 0; a < n_actions; ++a) {
    transitions.push_back(random_stochastic_rows(rng, n_states, n_states));
  }
  Matrix reward(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) reward(s, a) = rng.uniform();
  }
  Matrix behavior = random_stochastic_rows(rng, n_states, n_actions);
  Matrix target = random_stochastic_rows(rng, n_states, n_actions);
  Vector start = random_stochastic_rows(rng, 1, n_states).row(0).transpose();
  Matrix features(n_states, d);
  for (int s = 0; s < n_states; ++s) {
    for (int j = 0; j < d - 1; ++j) features(s, j) = rng.uniform();
    features(s, d - 1) = 1.0;
  }
  TabularMDP mdp(std::move(transitions), reward, 0.95, features,
                 std::vector<bool>(n_states, false), start);
  return {std::move(mdp), PolicyPair(behavior, target)};
}

SampleStream::SampleStream(const TabularMDP& mdp, const PolicyPair& policies, std::uint64_t seed,
                           SamplingMode mode)
    : mdp_(&mdp),
      policies_(&policies),
      mode_(mode),
      rng_(Rng::for_stream(seed, StreamPurpose::kDataset)) {
  policies.check_compatible(mdp);
  state_dist_ = mode == SamplingMode::kIid ? stationary_distribution(mdp, policies)
                                           : mdp.start_distribution();
  state_ = rng_.categorical(state_dist_);
}

void SampleStream::next(TransitionSample& out) {
  const TabularMDP& mdp = *mdp_;
  const StateIndex s = state_;
  const ActionIndex a = rng_.categorical(policies_->behavior().row(s));
  const StateIndex next = rng_.categorical(mdp.transition(a).row(s));
  out.state = s;
  out.action = a;
  out.next_state = next;
  out.reward = mdp.reward(s, a);
  out.rho = importance_ratio(*policies_, s, a);
  out.episode_end = mdp.is_terminal(next);
  out.phi = mdp.features().row(s).transpose();
  if (out.episode_end) {
    out.phi_next.setZero(mdp.n_features());
  } else {
    out.phi_next = mdp.features().row(next).transpose();
  }

  if (mode_ == SamplingMode::kIid) {
    state_ = rng_.categorical(state_dist_);
  } else {
    state_ = out.episode_end ? rng_.categorical(mdp.start_distribution()) : next;
  }
}

Dataset generate_dataset(const DatasetSpec& spec) {
  if (spec.horizon <= 0) throw ModelError("horizon must be positive");
  SampleStream stream(spec.mdp, spec.policies, spec.seed, spec.mode);
  Dataset out(static_cast<std::size_t>(spec.horizon));
  for (auto& sample : out) stream.next(sample);
  return out;
}

}  // namespace setd
