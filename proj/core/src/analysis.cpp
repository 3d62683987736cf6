#include "setd/analysis.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

#include "setd/linalg.hpp"

namespace setd {
namespace {

constexpr double kDegenerateNorm = 1e-12;

// Zeroes rows of terminal states and columns leading into them.
void restrict_to_nonterminal(const TabularMDP& mdp, Matrix& p) {
  for (int s = 0; s < mdp.n_states(); ++s) {
    if (!mdp.is_terminal(s)) continue;
    p.row(s).setZero();
    p.col(s).setZero();
  }
}

Vector normalized_nonnegative(Vector v) {
  v = v.cwiseMax(0.0);
  const double total = v.sum();
  if (!(total > 0.0)) throw NoStationaryDistributionError("visitation distribution is empty");
  return v / total;
}

}  // namespace

Vector stationary_distribution(const TabularMDP& mdp, const PolicyPair& policies) {
  policies.check_compatible(mdp);
  const int n = mdp.n_states();
  Matrix p_b = policy_transition(mdp, policies.behavior());

  if (mdp.is_episodic()) {
    restrict_to_nonterminal(mdp, p_b);
    const Matrix a = Matrix::Identity(n, n) - p_b.transpose();
    if (linalg::is_singular(a)) {
      throw NoStationaryDistributionError("episodes do not terminate with probability one");
    }
    return normalized_nonnegative(a.partialPivLu().solve(mdp.start_distribution()));
  }

  // xi^T (P_b - I) = 0 with one balance equation swapped for sum(xi) = 1.
  // The swapped system is nonsingular exactly when there is one recurrent class.
  Matrix a = p_b.transpose() - Matrix::Identity(n, n);
  a.row(n - 1).setOnes();
  if (linalg::is_singular(a)) {
    throw NoStationaryDistributionError("behavior chain has more than one recurrent class");
  }
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;
  return normalized_nonnegative(a.partialPivLu().solve(rhs));
}

ChainModel build_chain(const TabularMDP& mdp, const PolicyPair& policies) {
  policies.check_compatible(mdp);
  ChainModel chain;
  const int n = mdp.n_states();
  chain.gamma = mdp.gamma();
  chain.p_b = policy_transition(mdp, policies.behavior());
  chain.p_pi = policy_transition(mdp, policies.target());
  chain.r_pi = policy_reward(mdp, policies.target());
  if (mdp.is_episodic()) {
    restrict_to_nonterminal(mdp, chain.p_pi);
    for (int s = 0; s < n; ++s) {
      if (mdp.is_terminal(s)) chain.r_pi(s) = 0.0;
    }
  }
  chain.xi = stationary_distribution(mdp, policies);
  chain.l_pi = Matrix::Identity(n, n) - chain.gamma * chain.p_pi;
  return chain;
}

Vector true_value(const TabularMDP& mdp, const PolicyPair& policies) {
  const ChainModel chain = build_chain(mdp, policies);
  return linalg::solve(chain.l_pi, chain.r_pi, "L_pi");
}

Matrix projector(const Matrix& phi, const Vector& xi) {
  const Matrix xi_phi = xi.asDiagonal() * phi;
  return phi * linalg::pinv(phi.transpose() * xi_phi) * xi_phi.transpose();
}

BestApproximation best_approximation(const TabularMDP& mdp, const PolicyPair& policies) {
  const ChainModel chain = build_chain(mdp, policies);
  const Vector v = linalg::solve(chain.l_pi, chain.r_pi, "L_pi");
  const Matrix& phi = mdp.features();
  const Matrix xi_phi = chain.xi.asDiagonal() * phi;
  BestApproximation out;
  out.theta = linalg::pinv(phi.transpose() * xi_phi) * (xi_phi.transpose() * v);
  out.value = phi * out.theta;
  return out;
}

Matrix optimal_x(const TabularMDP& mdp, const PolicyPair& policies) {
  const ChainModel chain = build_chain(mdp, policies);
  const Matrix xi_phi = chain.xi.asDiagonal() * mdp.features();
  return linalg::solve(chain.l_pi.transpose(), xi_phi, "L_pi^T");
}

Vector fixed_point_solve(const TabularMDP& mdp, const PolicyPair& policies, const Matrix& y) {
  const Matrix& phi = mdp.features();
  if (y.rows() != phi.rows() || y.cols() != phi.cols()) {
    throw DimensionError("Y must be |S| x d");
  }
  const ChainModel chain = build_chain(mdp, policies);
  const Matrix yt_xi = y.transpose() * chain.xi.asDiagonal();
  // A product can cancel to rounding noise without looking ill-conditioned
  // (any nonzero 1x1 matrix has rcond 1), so compare against its factors.
  const auto vanishes = [](const Matrix& product, const Matrix& left, const Matrix& right) {
    return product.norm() <= 1e-12 * left.norm() * right.norm();
  };
  const Matrix xi_phi = yt_xi * phi;
  if (vanishes(xi_phi, yt_xi, phi) || linalg::is_singular(xi_phi)) {
    throw SingularMatrixError("Y^T Xi Phi is singular: the weighted oblique projection does not exist");
  }
  const Matrix l_phi = chain.l_pi * phi;
  const Matrix a = yt_xi * l_phi;
  if (vanishes(a, yt_xi, l_phi) || linalg::is_singular(a)) {
    throw SingularMatrixError("Y^T Xi L_pi Phi is singular: no fixed point");
  }
  return linalg::solve(a, Vector(yt_xi * chain.r_pi), "Y^T Xi L_pi Phi");
}

Vector setd_omega(const TabularMDP& mdp, const PolicyPair& policies) {
  const ChainModel chain = build_chain(mdp, policies);
  const Matrix& phi = mdp.features();
  const Matrix dphi = phi - chain.gamma * chain.p_pi * phi;
  Vector omega(mdp.n_states());
  for (int s = 0; s < mdp.n_states(); ++s) {
    const double norm2 = dphi.row(s).squaredNorm();
    omega(s) = norm2 < kDegenerateNorm ? 0.0
                                       : std::max(dphi.row(s).dot(phi.row(s)) / norm2, 0.0);
  }
  return omega;
}

Vector etd_omega(const TabularMDP& mdp, const PolicyPair& policies) {
  const ChainModel chain = build_chain(mdp, policies);
  const Matrix g_pt = chain.gamma * chain.p_pi.transpose();
  if (!(linalg::spectral_radius(g_pt) < 1.0 - 1e-12)) {
    throw SingularMatrixError("power series sum (gamma P_pi^T)^k does not converge");
  }
  const int n = mdp.n_states();
  return linalg::solve(Matrix(Matrix::Identity(n, n) - g_pt), chain.xi, "I - gamma P_pi^T");
}

Vector etd_expected_followon(const TabularMDP& mdp, const PolicyPair& policies) {
  const Vector f = etd_omega(mdp, policies);
  const Vector xi = stationary_distribution(mdp, policies);
  Vector out = Vector::Zero(f.size());
  for (Eigen::Index s = 0; s < f.size(); ++s) {
    if (xi(s) > 0.0) out(s) = f(s) / xi(s);
  }
  return out;
}

Vector optimal_omega(const TabularMDP& mdp, const PolicyPair& policies) {
  const Matrix x_star = optimal_x(mdp, policies);
  const Vector xi = stationary_distribution(mdp, policies);
  const Matrix& phi = mdp.features();
  Vector omega = Vector::Zero(mdp.n_states());
  for (int s = 0; s < mdp.n_states(); ++s) {
    const double denom = xi(s) * xi(s) * phi.row(s).squaredNorm();
    if (denom > 0.0) omega(s) = xi(s) * phi.row(s).dot(x_star.row(s)) / denom;
  }
  return omega;
}

ObliqueDiagnostics diagnose(const TabularMDP& mdp, const PolicyPair& policies, const Vector& omega) {
  if (omega.size() != mdp.n_states()) throw DimensionError("omega must have |S| entries");
  const ChainModel chain = build_chain(mdp, policies);
  const Matrix& phi = mdp.features();
  ObliqueDiagnostics d;
  d.omega = omega;
  d.x_star = linalg::solve(chain.l_pi.transpose(), Matrix(chain.xi.asDiagonal() * phi), "L_pi^T");
  d.x_of_omega = chain.xi.cwiseProduct(omega).asDiagonal() * phi;
  d.c = phi.transpose() * chain.xi.asDiagonal() * phi;
  d.lambda = chain.l_pi * phi;
  d.criterion = (d.lambda.transpose() * d.x_of_omega - d.c).squaredNorm();
  d.x_distance = linalg::spectral_norm(d.x_of_omega - d.x_star);
  return d;
}

double frobenius_criterion(const TabularMDP& mdp, const PolicyPair& policies, const Vector& omega) {
  return diagnose(mdp, policies, omega).criterion;
}

double x_distance(const TabularMDP& mdp, const PolicyPair& policies, const Vector& omega) {
  return diagnose(mdp, policies, omega).x_distance;
}

double omega_oracle(const FeatureVector& phi, const FeatureVector& dphi) {
  if (phi.size() != dphi.size()) throw DimensionError("phi and dphi differ in length");
  const Matrix target = phi * phi.transpose();
  const Matrix direction = dphi * phi.transpose();
  const auto objective = [&](double w) { return (w * direction - target).norm(); };

  const double scale = std::abs(dphi.dot(phi)) / std::max(dphi.squaredNorm(), 1e-12);
  double lo = 0.0;
  double hi = 10.0 * (scale + 1.0);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > 1e-10 * std::max(1.0, hi)) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  // Value comparisons stall near sqrt(eps) on a flat minimum. Polish with
  // bisection on the sign of the derivative, taken from the same matrices.
  const auto slope = [&](double w) {
    return (direction.array() * (w * direction - target).array()).sum();
  };
  const double mid = 0.5 * (lo + hi);
  const double pad = 1e-6 * std::max(1.0, mid);
  double a = std::max(0.0, mid - pad);
  double b = mid + pad;
  if (slope(a) < 0.0 && slope(b) > 0.0) {
    for (int i = 0; i < 200 && b - a > 0.0; ++i) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      (slope(m) < 0.0 ? a : b) = m;
    }
  }
  const double polished = 0.5 * (a + b);
  // The minimizer may sit on the boundary w = 0.
  return slope(0.0) >= 0.0 || objective(0.0) < objective(polished) ? 0.0 : polished;
}

Rank1Norms rank1_norms(const Vector& u, const Vector& v) {
  const Matrix m = u * v.transpose();
  Rank1Norms out;
  double sum_sq = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) sum_sq += m(i, j) * m(i, j);
  }
  out.frobenius = std::sqrt(sum_sq);
  out.trace_norm = m.size() == 0 ? 0.0 : Eigen::JacobiSVD<Matrix>(m).singularValues().sum();
  out.sigma_max = u.norm() * v.norm();
  return out;
}

}  // namespace setd
