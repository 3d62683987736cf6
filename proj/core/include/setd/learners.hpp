#pragma once

#include <optional>
#include <string_view>

#include "setd/types.hpp"

namespace setd {

enum class Algorithm { kTd, kTdLambda, kSetd, kSetdLambda, kEtd, kGtd2, kTdc };

std::string_view to_string(Algorithm algorithm);
// Accepts td, td_lambda, setd, setd_lambda, etd, gtd2, tdc (case-insensitive).
Algorithm parse_algorithm(std::string_view text);
// True for algorithms that read Hyperparams::lambda.
bool uses_lambda(Algorithm algorithm);
// True for GTD2 and TDC, which read Hyperparams::mu.
bool uses_mu(Algorithm algorithm);

struct Hyperparams {
  double alpha = 0.1;   // primary step size, (0, 1]
  double mu = 0.0;      // secondary step ratio: beta = alpha * mu
  double lambda = 0.0;  // trace decay, [0, 1]
  double gamma = 0.0;   // discount, copied from the MDP

  // Throws ModelError when a value is out of range.
  void validate() const;
};

// Weights beyond this magnitude (or non-finite) freeze the learner.
inline constexpr double kDivergenceBound = 1e8;

struct LearnerState {
  Algorithm algorithm = Algorithm::kTd;
  Vector theta;
  Vector w;       // GTD2 / TDC auxiliary weights
  Vector trace;   // eligibility trace e_t
  double followon = 1.0;
  long step_count = 0;
  bool diverged = false;
  // Next state of the previous sample, -1 at the start of an episode. ETD
  // uses it to reject non-sequential streams.
  StateIndex expected_state = -1;

  static LearnerState make(Algorithm algorithm, int d,
                           const std::optional<Vector>& theta0 = std::nullopt);
};

struct StepOutcome {
  double delta = 0.0;
  double omega = 0.0;
  bool diverged = false;
};

// Closed-form SETD weight for one transition:
// max((phi - gamma phi')^T phi / ||phi - gamma phi'||^2, 0), and 0 when
// ||phi - gamma phi'||^2 < 1e-12.
double compute_omega(const FeatureVector& phi, const FeatureVector& phi_next, double gamma);

// Every step function updates `state` in place, touches only O(d) memory and
// never allocates. A diverged state is left untouched.

// theta += alpha * rho * omega * delta * phi
StepOutcome setd_step(LearnerState& state, const TransitionSample& s, const Hyperparams& h);

// e = rho * (lambda * gamma * e + omega * phi); theta += alpha * delta * e.
// The trace is cleared after a sample that ends an episode.
StepOutcome setd_lambda_step(LearnerState& state, const TransitionSample& s, const Hyperparams& h);

// e = rho * (lambda * gamma * e + phi); theta += alpha * delta * e.
// Serves both TD (lambda ignored, treated as 0) and TD_LAMBDA.
StepOutcome td_lambda_step(LearnerState& state, const TransitionSample& s, const Hyperparams& h);

// Emphatic TD(0): theta += alpha * F * rho * delta * phi, then
// F = 1 + gamma * rho * F (reset to 1 at episode end). Throws
// ContractViolation when the stream is not sequential.
StepOutcome etd_step(LearnerState& state, const TransitionSample& s, const Hyperparams& h);

// Gradient TD with beta = alpha * mu:
//   theta += alpha * rho * (phi - gamma phi') (phi^T w)
//   w     += beta * (rho * delta - phi^T w) * phi
StepOutcome gtd2_step(LearnerState& state, const TransitionSample& s, const Hyperparams& h);

//   theta += alpha * rho * (delta phi - gamma phi' (phi^T w))
//   w     += beta * (rho * delta - phi^T w) * phi
StepOutcome tdc_step(LearnerState& state, const TransitionSample& s, const Hyperparams& h);

// Dispatches on state.algorithm.
StepOutcome step(LearnerState& state, const TransitionSample& s, const Hyperparams& h);

// Clears traces and the follow-on trace; keeps theta and w.
void reset(LearnerState& state);

}  // namespace setd
