#pragma once

#include "setd/types.hpp"

namespace setd {

// Exact reference quantities for scoring a weight vector. Built once per
// experiment and shared read-only.
struct GroundTruth {
  Vector v;         // true value of the target policy
  Vector xi;        // state weighting
  Matrix pi;        // Phi (Phi^T Xi Phi)^+ Phi^T Xi
  Vector r_pi;
  Matrix p_pi;
  double gamma = 0.0;

  // T(v) = R_pi + gamma P_pi v
  Vector bellman(const Vector& values) const { return r_pi + gamma * (p_pi * values); }

  static GroundTruth build(const TabularMDP& mdp, const PolicyPair& policies);
};

// sqrt(sum_s xi(s) (phi(s)^T theta - V(s))^2)
double rmse(const Vector& theta, const GroundTruth& gt, const Matrix& phi);

// sqrt(||v - Pi T v||_xi^2) with v = Phi theta
double rmspbe(const Vector& theta, const GroundTruth& gt, const Matrix& phi);

}  // namespace setd
