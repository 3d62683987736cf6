#include "setd/metrics.hpp"

#include <cmath>

#include "setd/analysis.hpp"
#include "setd/linalg.hpp"

namespace setd {
namespace {

void check_dims(const Vector& theta, const GroundTruth& gt, const Matrix& phi) {
  if (phi.cols() != theta.size() || phi.rows() != gt.v.size()) {
    throw DimensionError("theta / feature matrix / ground truth dimensions disagree");
  }
}

double xi_norm(const Vector& r, const Vector& xi) {
  return std::sqrt(r.cwiseProduct(r).dot(xi));
}

}  // namespace

GroundTruth GroundTruth::build(const TabularMDP& mdp, const PolicyPair& policies) {
  const ChainModel chain = build_chain(mdp, policies);
  GroundTruth gt;
  gt.v = linalg::solve(chain.l_pi, chain.r_pi, "L_pi");
  gt.xi = chain.xi;
  gt.pi = projector(mdp.features(), chain.xi);
  gt.r_pi = chain.r_pi;
  gt.p_pi = chain.p_pi;
  gt.gamma = chain.gamma;
  return gt;
}

double rmse(const Vector& theta, const GroundTruth& gt, const Matrix& phi) {
  check_dims(theta, gt, phi);
  return xi_norm(phi * theta - gt.v, gt.xi);
}

double rmspbe(const Vector& theta, const GroundTruth& gt, const Matrix& phi) {
  check_dims(theta, gt, phi);
  const Vector v = phi * theta;
  return xi_norm(v - gt.pi * gt.bellman(v), gt.xi);
}

}  // namespace setd
