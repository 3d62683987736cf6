#pragma once

#include "setd/types.hpp"

namespace setd {

/// Exact model quantities of the Markov chains induced by a policy pair.
///
/// For episodic MDPs the chain is restricted to non-terminal states: rows of
/// terminal states and transitions into them are zeroed in `p_pi`, so the
/// terminal value is pinned to 0 and `l_pi` stays invertible at gamma = 1.
struct ChainModel {
  Matrix p_pi;   // target-policy transitions (substochastic if episodic)
  Matrix p_b;    // behavior-policy transitions, unrestricted
  Vector r_pi;   // expected one-step reward under the target policy
  Vector xi;     // behavior stationary / per-episode visitation distribution
  Matrix l_pi;   // I - gamma * p_pi
  double gamma = 0.0;
};

ChainModel build_chain(const TabularMDP& mdp, const PolicyPair& policies);

/// Stationary distribution of the behavior chain.
///
/// Continuing MDPs: the unique xi with xi^T P_b = xi^T; periodic chains are
/// fine as long as there is a single recurrent class. Episodic MDPs: the
/// normalized expected number of visits per episode, zero on terminal states.
/// Throws NoStationaryDistributionError when xi is not unique.
Vector stationary_distribution(const TabularMDP& mdp, const PolicyPair& policies);

/// Solves L_pi V = R_pi. Throws SingularMatrixError.
Vector true_value(const TabularMDP& mdp, const PolicyPair& policies);

struct BestApproximation {
  Vector theta;  // argmin_theta ||Phi theta - V||_xi
  Vector value;  // Pi V
};

/// Xi-weighted least-squares fit of the true value; rank-deficient C uses
/// the pseudo-inverse.
BestApproximation best_approximation(const TabularMDP& mdp, const PolicyPair& policies);

/// X* = (L_pi^T)^{-1} Xi Phi, the oblique projection whose fixed point is
/// the best approximation. Throws SingularMatrixError.
Matrix optimal_x(const TabularMDP& mdp, const PolicyPair& policies);

/// theta = (Y^T Xi L_pi Phi)^{-1} Y^T Xi R_pi, the solution of the weighted
/// oblique projected Bellman equation with weighting matrix Y (|S| x d).
/// Throws SingularMatrixError naming Y^T Xi Phi or Y^T Xi L_pi Phi.
Vector fixed_point_solve(const TabularMDP& mdp, const PolicyPair& policies, const Matrix& y);

/// Per-state SETD weights: omega(s) = max(dphi(s)^T phi(s) / ||dphi(s)||^2, 0)
/// with the expected feature difference dphi(s) = phi(s) - gamma E[phi(s')].
Vector setd_omega(const TabularMDP& mdp, const PolicyPair& policies);

/// ETD emphasis vector f = (I - gamma P_pi^T)^{-1} xi, used directly as the
/// diagonal of Omega_E. Throws SingularMatrixError when the spectral radius
/// of gamma P_pi is not below 1.
Vector etd_omega(const TabularMDP& mdp, const PolicyPair& policies);

/// Asymptotic expected follow-on trace per state, f(i) / xi(i); zero where
/// xi(i) = 0.
Vector etd_expected_followon(const TabularMDP& mdp, const PolicyPair& policies);

/// Least-squares diagonal Omega minimizing ||Xi Omega Phi - X*||_F. Needs
/// X*, so this is only a diagnostic on small models.
Vector optimal_omega(const TabularMDP& mdp, const PolicyPair& policies);

/// ||Lambda^T Xi Omega Phi - C||_F^2 with Lambda = L_pi Phi, C = Phi^T Xi Phi.
double frobenius_criterion(const TabularMDP& mdp, const PolicyPair& policies, const Vector& omega);

/// Spectral norm of Xi Omega Phi - X*.
double x_distance(const TabularMDP& mdp, const PolicyPair& policies, const Vector& omega);

struct ObliqueDiagnostics {
  Matrix x_star;
  Vector omega;
  Matrix x_of_omega;  // Xi Omega Phi
  double criterion = 0.0;
  double x_distance = 0.0;
  Matrix c;       // Phi^T Xi Phi
  Matrix lambda;  // L_pi Phi
};

ObliqueDiagnostics diagnose(const TabularMDP& mdp, const PolicyPair& policies, const Vector& omega);

/// Numeric minimizer of ||w dphi phi^T - phi phi^T||_F over w >= 0: golden-
/// section search, then bisection on the sign of the derivative of the same
/// explicit matrix expression. Independent of the closed form; used to check it.
double omega_oracle(const FeatureVector& phi, const FeatureVector& dphi);

struct Rank1Norms {
  double frobenius = 0.0;
  double trace_norm = 0.0;
  double sigma_max = 0.0;
};

/// Norms of M = u v^T computed independently: frobenius from the entrywise
/// sum of squares of M, trace_norm as the sum of M's singular values, and
/// sigma_max as ||u|| * ||v||. All three coincide for a rank-1 matrix.
Rank1Norms rank1_norms(const Vector& u, const Vector& v);

/// Phi (Phi^T Xi Phi)^+ Phi^T Xi.
Matrix projector(const Matrix& phi, const Vector& xi);

}  // namespace setd
