#include "setd/learners.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

namespace setd {
namespace {

constexpr double kDegenerateNorm = 1e-12;

// Runs before any update: checks shapes and short-circuits frozen states.
bool begin_step(LearnerState& state, const TransitionSample& s, StepOutcome& out) {
  if (s.phi.size() != state.theta.size() || s.phi_next.size() != state.theta.size()) {
    throw DimensionError("sample features do not match the learner's dimension");
  }
  if (state.diverged) {
    out.diverged = true;
    out.delta = std::numeric_limits<double>::quiet_NaN();
    return false;
  }
  return true;
}

double td_error(const LearnerState& state, const TransitionSample& s, double gamma) {
  return s.reward + gamma * s.phi_next.dot(state.theta) - s.phi.dot(state.theta);
}

void end_step(LearnerState& state, const TransitionSample& s, StepOutcome& out) {
  ++state.step_count;
  state.expected_state = s.episode_end ? -1 : s.next_state;
  if (!state.theta.allFinite() || !state.w.allFinite() ||
      state.theta.lpNorm<Eigen::Infinity>() > kDivergenceBound) {
    state.diverged = true;
  }
  out.diverged = state.diverged;
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kTd: return "TD";
    case Algorithm::kTdLambda: return "TD_LAMBDA";
    case Algorithm::kSetd: return "SETD";
    case Algorithm::kSetdLambda: return "SETD_LAMBDA";
    case Algorithm::kEtd: return "ETD";
    case Algorithm::kGtd2: return "GTD2";
    case Algorithm::kTdc: return "TDC";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "td") return Algorithm::kTd;
  if (lower == "td_lambda") return Algorithm::kTdLambda;
  if (lower == "setd") return Algorithm::kSetd;
  if (lower == "setd_lambda") return Algorithm::kSetdLambda;
  if (lower == "etd") return Algorithm::kEtd;
  if (lower == "gtd2") return Algorithm::kGtd2;
  if (lower == "tdc") return Algorithm::kTdc;
  throw ConfigError("unknown algorithm '" + std::string(text) + "'");
}

bool uses_lambda(Algorithm algorithm) {
  return algorithm == Algorithm::kTdLambda || algorithm == Algorithm::kSetdLambda;
}

bool uses_mu(Algorithm algorithm) {
  return algorithm == Algorithm::kGtd2 || algorithm == Algorithm::kTdc;
}

void Hyperparams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ModelError("alpha must lie in (0, 1]");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ModelError("mu must be >= 0");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ModelError("lambda must lie in [0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ModelError("gamma must lie in [0, 1]");
}

LearnerState LearnerState::make(Algorithm algorithm, int d, const std::optional<Vector>& theta0) {
  if (d < 1) throw DimensionError("feature dimension must be positive");
  LearnerState state;
  state.algorithm = algorithm;
  if (theta0) {
    if (theta0->size() != d) throw DimensionError("initial theta has the wrong length");
    state.theta = *theta0;
  } else {
    state.theta = Vector::Zero(d);
  }
  state.w = Vector::Zero(d);
  state.trace = Vector::Zero(d);
  return state;
}

double compute_omega(const FeatureVector& phi, const FeatureVector& phi_next, double gamma) {
  if (phi.size() != phi_next.size()) throw DimensionError("phi and phi' differ in length");
  double num = 0.0;
  double norm2 = 0.0;
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    const double dphi = phi[i] - gamma * phi_next[i];
    num += dphi * phi[i];
    norm2 += dphi * dphi;
  }
  if (norm2 < kDegenerateNorm) return 0.0;
  return std::max(num / norm2, 0.0);
}

// SETD, SETD(lambda) and TD(lambda) share one loop shape,
//   e_i = rho * (decay * e_i + weight * phi_i);  theta_i += alpha * delta * e_i,
// so that SETD(0) reproduces SETD and gamma = 0 SETD reproduces TD(0) bit for bit.
StepOutcome setd_step(LearnerState& state, const TransitionSample& s, const Hyperparams& h) {
  StepOutcome out;
  if (!begin_step(state, s, out)) return out;
  out.delta = td_error(state, s, h.gamma);
  out.omega = compute_omega(s.phi, s.phi_next, h.gamma);
  const double step = h.alpha * out.delta;
  for (Eigen::Index i = 0; i < s.phi.size(); ++i) {
    state.theta[i] += step * (s.rho * (out.omega * s.phi[i]));
  }
  end_step(state, s, out);
  return out;
}

namespace {

void trace_update(LearnerState& state, const TransitionSample& s, double decay, double weight,
                  double step) {
  for (Eigen::Index i = 0; i < s.phi.size(); ++i) {
    state.trace[i] = s.rho * (decay * state.trace[i] + weight * s.phi[i]);
    state.theta[i] += step * state.trace[i];
  }
  if (s.episode_end) state.trace.setZero();
}

}  // namespace

StepOutcome setd_lambda_step(LearnerState& state, const TransitionSample& s, const Hyperparams& h) {
  StepOutcome out;
  if (!begin_step(state, s, out)) return out;
  out.delta = td_error(state, s, h.gamma);
  out.omega = compute_omega(s.phi, s.phi_next, h.gamma);
  trace_update(state, s, h.lambda * h.gamma, out.omega, h.alpha * out.delta);
  end_step(state, s, out);
  return out;
}

StepOutcome td_lambda_step(LearnerState& state, const TransitionSample& s, const Hyperparams& h) {
  StepOutcome out;
  if (!begin_step(state, s, out)) return out;
  const double lambda = state.algorithm == Algorithm::kTd ? 0.0 : h.lambda;
  out.delta = td_error(state, s, h.gamma);
  trace_update(state, s, lambda * h.gamma, 1.0, h.alpha * out.delta);
  end_step(state, s, out);
  return out;
}

StepOutcome etd_step(LearnerState& state, const TransitionSample& s, const Hyperparams& h) {
  StepOutcome out;
  if (!begin_step(state, s, out)) return out;
  if (state.expected_state >= 0 && s.state != state.expected_state) {
    throw ContractViolation("ETD needs a sequential stream: expected state " +
                            std::to_string(state.expected_state) + ", got " +
                            std::to_string(s.state));
  }
  out.delta = td_error(state, s, h.gamma);
  state.theta += (h.alpha * state.followon * s.rho * out.delta) * s.phi;
  state.followon = s.episode_end ? 1.0 : 1.0 + h.gamma * s.rho * state.followon;
  end_step(state, s, out);
  return out;
}

StepOutcome gtd2_step(LearnerState& state, const TransitionSample& s, const Hyperparams& h) {
  StepOutcome out;
  if (!begin_step(state, s, out)) return out;
  out.delta = td_error(state, s, h.gamma);
  const double phi_w = s.phi.dot(state.w);
  state.theta.noalias() += (h.alpha * s.rho * phi_w) * (s.phi - h.gamma * s.phi_next);
  state.w += (h.alpha * h.mu * (s.rho * out.delta - phi_w)) * s.phi;
  end_step(state, s, out);
  return out;
}

StepOutcome tdc_step(LearnerState& state, const TransitionSample& s, const Hyperparams& h) {
  StepOutcome out;
  if (!begin_step(state, s, out)) return out;
  out.delta = td_error(state, s, h.gamma);
  const double phi_w = s.phi.dot(state.w);
  state.theta.noalias() +=
      (h.alpha * s.rho) * (out.delta * s.phi - (h.gamma * phi_w) * s.phi_next);
  state.w += (h.alpha * h.mu * (s.rho * out.delta - phi_w)) * s.phi;
  end_step(state, s, out);
  return out;
}

StepOutcome step(LearnerState& state, const TransitionSample& s, const Hyperparams& h) {
  switch (state.algorithm) {
    case Algorithm::kTd:
    case Algorithm::kTdLambda: return td_lambda_step(state, s, h);
    case Algorithm::kSetd: return setd_step(state, s, h);
    case Algorithm::kSetdLambda: return setd_lambda_step(state, s, h);
    case Algorithm::kEtd: return etd_step(state, s, h);
    case Algorithm::kGtd2: return gtd2_step(state, s, h);
    case Algorithm::kTdc: return tdc_step(state, s, h);
  }
  throw ModelError("unknown algorithm");
}

void reset(LearnerState& state) {
  state.trace.setZero();
  state.followon = 1.0;
  state.expected_state = -1;
}

}  // namespace setd
