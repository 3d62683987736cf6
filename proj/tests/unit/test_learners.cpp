#include <gtest/gtest.h>

#include "setd/envs.hpp"
#include "setd/learners.hpp"
#include "test_models.hpp"

namespace setd {
namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

TransitionSample sample(Vector phi, double reward, Vector phi_next, double rho = 1.0) {
  TransitionSample s;
  s.phi = std::move(phi);
  s.reward = reward;
  s.phi_next = std::move(phi_next);
  s.rho = rho;
  return s;
}

Hyperparams params(double alpha, double gamma, double lambda = 0.0, double mu = 0.0) {
  Hyperparams h;
  h.alpha = alpha;
  h.gamma = gamma;
  h.lambda = lambda;
  h.mu = mu;
  return h;
}

Dataset random_stream(std::uint64_t seed, long horizon, bool on_policy = false) {
  const Environment env = build_random_mdp(12, 3, 5, seed);
  const PolicyPair pol = on_policy ? PolicyPair(env.policies.behavior(), env.policies.behavior())
                                   : env.policies;
  return generate_dataset({env.mdp, pol, horizon, seed, SamplingMode::kSequential});
}

TEST(ComputeOmega, Examples) {
  EXPECT_EQ(compute_omega(vec({1}), vec({2}), 0.9), 0.0);
  EXPECT_NEAR(compute_omega(vec({2}), vec({2}), 0.9), 10.0, 1e-12);
  EXPECT_EQ(compute_omega(vec({0.3, -2, 5}), vec({7, 1, 1}), 0.0), 1.0);
}

TEST(ComputeOmega, DegenerateDifferenceIsZero) {
  EXPECT_EQ(compute_omega(vec({1, 1}), vec({1, 1}), 1.0), 0.0);
  EXPECT_EQ(compute_omega(vec({0, 0}), vec({0, 0}), 0.5), 0.0);
}

TEST(ComputeOmega, NonnegativeAndZeroExactlyWhenAligned) {
  Rng rng = Rng::for_stream(1, StreamPurpose::kTest);
  for (int trial = 0; trial < 2000; ++trial) {
    const int d = 1 + trial % 8;
    const Vector phi = testing::random_matrix(rng, d, 1);
    const Vector next = testing::random_matrix(rng, d, 1);
    const double gamma = rng.uniform();
    const double w = compute_omega(phi, next, gamma);
    const Vector dphi = phi - gamma * next;
    ASSERT_GE(w, 0.0);
    const bool expect_zero = dphi.dot(phi) <= 0.0 || dphi.squaredNorm() < 1e-12;
    ASSERT_EQ(w == 0.0, expect_zero);
  }
}

TEST(ComputeOmega, ScaleInvariant) {
  Rng rng = Rng::for_stream(2, StreamPurpose::kTest);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + trial % 8;
    const Vector phi = testing::random_matrix(rng, d, 1);
    const Vector next = testing::random_matrix(rng, d, 1);
    const double gamma = rng.uniform();
    const double base = compute_omega(phi, next, gamma);
    for (double c : {-3.0, -0.5, 0.25, 2.0, 17.0}) {
      ASSERT_NEAR(compute_omega(c * phi, c * next, gamma), base, 1e-12 * std::max(1.0, base));
    }
    ASSERT_EQ(compute_omega(4.0 * phi, 4.0 * next, gamma), base);
  }
}

TEST(SetdStep, HandCase) {
  LearnerState st = LearnerState::make(Algorithm::kSetd, 1);
  const StepOutcome out = setd_step(st, sample(vec({1}), 1.0, vec({0})), params(0.1, 0.9));
  EXPECT_DOUBLE_EQ(out.delta, 1.0);
  EXPECT_DOUBLE_EQ(out.omega, 1.0);
  EXPECT_DOUBLE_EQ(st.theta(0), 0.1);
  EXPECT_EQ(st.step_count, 1);
}

TEST(SetdStep, ZeroRatioLeavesThetaUnchanged) {
  LearnerState st = LearnerState::make(Algorithm::kSetd, 2, vec({0.3, -0.2}));
  setd_step(st, sample(vec({1, 2}), 5.0, vec({0, 1}), 0.0), params(0.5, 0.9));
  EXPECT_EQ(st.theta, vec({0.3, -0.2}));
}

TEST(SetdStep, ZeroOmegaLeavesThetaUnchanged) {
  // Two-state left state: phi = 1, phi' = 2, gamma = 0.9.
  LearnerState st = LearnerState::make(Algorithm::kSetd, 1, vec({0.7}));
  const StepOutcome out = setd_step(st, sample(vec({1}), 3.0, vec({2}), 2.0), params(0.5, 0.9));
  EXPECT_NE(out.delta, 0.0);
  EXPECT_EQ(out.omega, 0.0);
  EXPECT_EQ(st.theta(0), 0.7);
}

TEST(SetdLambda, TwoStepTrace) {
  LearnerState st = LearnerState::make(Algorithm::kSetdLambda, 1);
  EXPECT_TRUE(st.trace.isZero(0.0));
  const Hyperparams h = params(0.1, 0.9, 0.5);
  // phi' = 0 makes omega = 1 on both steps
  setd_lambda_step(st, sample(vec({1}), 0.0, vec({0})), h);
  EXPECT_DOUBLE_EQ(st.trace(0), 1.0);
  setd_lambda_step(st, sample(vec({2}), 0.0, vec({0})), h);
  EXPECT_NEAR(st.trace(0), 2.45, 1e-15);
}

TEST(SetdLambda, TraceClearedAtEpisodeEnd) {
  LearnerState st = LearnerState::make(Algorithm::kSetdLambda, 2);
  TransitionSample s = sample(vec({1, 0}), 1.0, vec({0, 0}));
  s.episode_end = true;
  setd_lambda_step(st, s, params(0.1, 1.0, 0.8));
  EXPECT_TRUE(st.trace.isZero(0.0));
  EXPECT_NE(st.theta(0), 0.0);
}

TEST(SetdLambda, LambdaZeroIsBitIdenticalToSetd) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Dataset data = random_stream(seed, 5000);
    LearnerState a = LearnerState::make(Algorithm::kSetd, 5);
    LearnerState b = LearnerState::make(Algorithm::kSetdLambda, 5);
    const Hyperparams h = params(0.01, 0.95, 0.0);
    for (const auto& s : data) {
      setd_step(a, s, h);
      setd_lambda_step(b, s, h);
      ASSERT_EQ(a.theta, b.theta);
    }
  }
}

TEST(Setd, ZeroDiscountMatchesTdBitForBit) {
  for (std::uint64_t seed : {4u, 5u}) {
    const Dataset data = random_stream(seed, 5000);
    LearnerState a = LearnerState::make(Algorithm::kSetd, 5);
    LearnerState b = LearnerState::make(Algorithm::kTd, 5);
    const Hyperparams h = params(0.01, 0.0);
    for (const auto& s : data) {
      const StepOutcome out = setd_step(a, s, h);
      td_lambda_step(b, s, h);
      ASSERT_EQ(out.omega, 1.0);
      ASSERT_EQ(a.theta, b.theta);
    }
  }
}

TEST(TdStep, HandCaseAndLambdaIgnoredForTd) {
  LearnerState st = LearnerState::make(Algorithm::kTd, 1);
  td_lambda_step(st, sample(vec({1}), 1.0, vec({0})), params(0.1, 0.9, 0.9));
  EXPECT_DOUBLE_EQ(st.theta(0), 0.1);
  td_lambda_step(st, sample(vec({1}), 0.0, vec({0})), params(0.1, 0.9, 0.9));
  EXPECT_DOUBLE_EQ(st.trace(0), 1.0);
}

TEST(TdStep, EqualsSetdWhereOmegaIsOne) {
  // phi' = 0 forces omega = 1
  Rng rng = Rng::for_stream(3, StreamPurpose::kTest);
  LearnerState a = LearnerState::make(Algorithm::kSetd, 3);
  LearnerState b = LearnerState::make(Algorithm::kTd, 3);
  for (int t = 0; t < 200; ++t) {
    const TransitionSample s = sample(testing::random_matrix(rng, 3, 1), rng.uniform(), Vector::Zero(3));
    setd_step(a, s, params(0.05, 0.9));
    td_lambda_step(b, s, params(0.05, 0.9));
    ASSERT_EQ(a.theta, b.theta);
  }
}

TEST(TdLambda, OffPolicyTraceIncludesRatio) {
  LearnerState st = LearnerState::make(Algorithm::kTdLambda, 1);
  td_lambda_step(st, sample(vec({1}), 0.0, vec({0}), 2.0), params(0.1, 0.5, 0.5));
  EXPECT_DOUBLE_EQ(st.trace(0), 2.0);
  td_lambda_step(st, sample(vec({1}), 0.0, vec({0}), 3.0), params(0.1, 0.5, 0.5));
  EXPECT_DOUBLE_EQ(st.trace(0), 3.0 * (0.25 * 2.0 + 1.0));
}

TEST(EtdStep, FollowOnSequence) {
  const Environment env = build_two_state();
  LearnerState st = LearnerState::make(Algorithm::kEtd, 1);
  const Hyperparams h = params(0.1, 0.9);
  TransitionSample s;
  s.state = 1;
  s.action = 1;
  s.next_state = 1;
  s.rho = 2.0;
  s.phi = vec({2});
  s.phi_next = vec({2});
  std::vector<double> seen;
  for (int t = 0; t < 3; ++t) {
    seen.push_back(st.followon);
    etd_step(st, s, h);
  }
  EXPECT_DOUBLE_EQ(seen[0], 1.0);
  EXPECT_NEAR(seen[1], 2.8, 1e-14);
  EXPECT_NEAR(seen[2], 6.04, 1e-14);
}

TEST(EtdStep, FirstStepUsesUnitEmphasis) {
  LearnerState st = LearnerState::make(Algorithm::kEtd, 1);
  etd_step(st, sample(vec({1}), 1.0, vec({0})), params(0.1, 0.9));
  EXPECT_DOUBLE_EQ(st.theta(0), 0.1);
}

TEST(EtdStep, ZeroRatioResetsFollowOn) {
  LearnerState st = LearnerState::make(Algorithm::kEtd, 1);
  st.followon = 5.0;
  etd_step(st, sample(vec({1}), 1.0, vec({1}), 0.0), params(0.1, 0.9));
  EXPECT_EQ(st.followon, 1.0);
}

TEST(EtdStep, EpisodeEndResetsFollowOn) {
  LearnerState st = LearnerState::make(Algorithm::kEtd, 1);
  TransitionSample s = sample(vec({1}), 1.0, vec({0}));
  etd_step(st, s, params(0.1, 1.0));
  EXPECT_EQ(st.followon, 2.0);
  s.episode_end = true;
  etd_step(st, s, params(0.1, 1.0));
  EXPECT_EQ(st.followon, 1.0);
}

TEST(EtdStep, RejectsNonSequentialStream) {
  const Environment env = build_random_mdp(10, 2, 3, 1);
  const Dataset data = generate_dataset({env.mdp, env.policies, 200, 3, SamplingMode::kIid});
  LearnerState st = LearnerState::make(Algorithm::kEtd, 3);
  const Hyperparams h = params(0.001, 0.95);
  EXPECT_THROW(
      {
        for (const auto& s : data) etd_step(st, s, h);
      },
      ContractViolation);

  LearnerState ok = LearnerState::make(Algorithm::kEtd, 3);
  for (const auto& s : generate_dataset({env.mdp, env.policies, 200, 3, SamplingMode::kSequential})) {
    EXPECT_NO_THROW(etd_step(ok, s, h));
  }
}

TEST(Gtd2Step, ZeroAuxiliaryKeepsTheta) {
  LearnerState st = LearnerState::make(Algorithm::kGtd2, 2, vec({0.5, 0.5}));
  gtd2_step(st, sample(vec({1, 2}), 1.0, vec({2, 1})), params(0.1, 0.9, 0.0, 1.0));
  EXPECT_EQ(st.theta, vec({0.5, 0.5}));
  EXPECT_NE(st.w, Vector::Zero(2));
}

TEST(GradientTd, ZeroRatioLeavesStateUnchanged) {
  for (Algorithm alg : {Algorithm::kGtd2, Algorithm::kTdc}) {
    LearnerState st = LearnerState::make(alg, 2, vec({0.5, -0.5}));
    step(st, sample(vec({1, 2}), 1.0, vec({2, 1}), 0.0), params(0.1, 0.9, 0.0, 1.0));
    EXPECT_EQ(st.theta, vec({0.5, -0.5}));
    EXPECT_EQ(st.w, Vector::Zero(2));
  }
}

TEST(GradientTd, AuxiliaryUpdate) {
  LearnerState st = LearnerState::make(Algorithm::kGtd2, 1);
  st.w = vec({0.5});
  // delta = 1, phi^T w = 0.5: w += 0.1 * 2 * (3 * 1 - 0.5) * 1
  gtd2_step(st, sample(vec({1}), 1.0, vec({0}), 3.0), params(0.1, 0.9, 0.0, 2.0));
  EXPECT_NEAR(st.w(0), 0.5 + 0.2 * 2.5, 1e-15);
  // theta += alpha * rho * (phi - gamma phi') (phi^T w)
  EXPECT_NEAR(st.theta(0), 0.1 * 3.0 * 0.5, 1e-15);
}

TEST(TdcStep, ZeroAuxiliaryIsImportanceWeightedTd) {
  Rng rng = Rng::for_stream(4, StreamPurpose::kTest);
  for (int t = 0; t < 100; ++t) {
    const Vector theta = testing::random_matrix(rng, 3, 1);
    const TransitionSample s = sample(testing::random_matrix(rng, 3, 1), rng.uniform(),
                                      testing::random_matrix(rng, 3, 1), 2.0 * rng.uniform());
    LearnerState a = LearnerState::make(Algorithm::kTdc, 3, theta);
    LearnerState b = LearnerState::make(Algorithm::kTd, 3, theta);
    tdc_step(a, s, params(0.05, 0.9, 0.0, 1.0));
    td_lambda_step(b, s, params(0.05, 0.9));
    ASSERT_TRUE(a.theta.isApprox(b.theta, 1e-14));
  }
}

TEST(Divergence, FlagFreezesState) {
  LearnerState st = LearnerState::make(Algorithm::kTd, 1, vec({9e7}));
  const StepOutcome out = td_lambda_step(st, sample(vec({1}), 0.0, vec({10})), params(1.0, 1.0));
  EXPECT_TRUE(out.diverged);
  EXPECT_TRUE(st.diverged);
  const Vector frozen = st.theta;
  const long count = st.step_count;
  const StepOutcome again = td_lambda_step(st, sample(vec({1}), 0.0, vec({10})), params(1.0, 1.0));
  EXPECT_TRUE(again.diverged);
  EXPECT_EQ(st.theta, frozen);
  EXPECT_EQ(st.step_count, count);
}

TEST(Divergence, NonFiniteFlags) {
  LearnerState st = LearnerState::make(Algorithm::kSetd, 1);
  TransitionSample s = sample(vec({1}), std::numeric_limits<double>::infinity(), vec({0}));
  setd_step(st, s, params(0.1, 0.5));
  EXPECT_TRUE(st.diverged);
}

TEST(Reset, ClearsTracesKeepsWeights) {
  LearnerState st = LearnerState::make(Algorithm::kSetdLambda, 2, vec({1, 2}));
  st.trace = vec({3, 4});
  st.followon = 7.0;
  st.w = vec({5, 6});
  reset(st);
  EXPECT_TRUE(st.trace.isZero(0.0));
  EXPECT_EQ(st.followon, 1.0);
  EXPECT_EQ(st.theta, vec({1, 2}));
  EXPECT_EQ(st.w, vec({5, 6}));
}

TEST(Learners, DeterministicOnIdenticalStreams) {
  const Dataset data = random_stream(9, 3000);
  for (Algorithm alg : {Algorithm::kTd, Algorithm::kTdLambda, Algorithm::kSetd, Algorithm::kSetdLambda,
                        Algorithm::kEtd, Algorithm::kGtd2, Algorithm::kTdc}) {
    LearnerState a = LearnerState::make(alg, 5);
    LearnerState b = LearnerState::make(alg, 5);
    const Hyperparams h = params(0.001, 0.95, 0.5, 0.5);
    for (const auto& s : data) {
      step(a, s, h);
      step(b, s, h);
    }
    EXPECT_EQ(a.theta, b.theta) << to_string(alg);
    EXPECT_EQ(a.w, b.w);
    EXPECT_EQ(a.trace, b.trace);
  }
}

TEST(Learners, DimensionMismatchThrows) {
  LearnerState st = LearnerState::make(Algorithm::kSetd, 2);
  EXPECT_THROW(setd_step(st, sample(vec({1}), 0.0, vec({1})), params(0.1, 0.5)), DimensionError);
  EXPECT_THROW(LearnerState::make(Algorithm::kSetd, 2, vec({1, 2, 3})), DimensionError);
}

TEST(Hyperparams, Validation) {
  EXPECT_NO_THROW(params(1.0, 1.0, 1.0, 16.0).validate());
  EXPECT_THROW(params(0.0, 0.5).validate(), ModelError);
  EXPECT_THROW(params(1.5, 0.5).validate(), ModelError);
  EXPECT_THROW(params(0.1, 0.5, -0.1).validate(), ModelError);
  EXPECT_THROW(params(0.1, 0.5, 0.0, -1.0).validate(), ModelError);
}

TEST(Algorithm, NamesRoundTrip) {
  for (Algorithm alg : {Algorithm::kTd, Algorithm::kTdLambda, Algorithm::kSetd, Algorithm::kSetdLambda,
                        Algorithm::kEtd, Algorithm::kGtd2, Algorithm::kTdc}) {
    EXPECT_EQ(parse_algorithm(to_string(alg)), alg);
  }
  EXPECT_EQ(parse_algorithm("setd"), Algorithm::kSetd);
  EXPECT_THROW(parse_algorithm("sarsa"), ConfigError);
}

}  // namespace
}  // namespace setd
