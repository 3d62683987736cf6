#include "setd/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <iostream>
#include <string>

namespace setd::linalg {
namespace {

Eigen::PartialPivLU<Matrix> factor(const Matrix& a, std::string_view what) {
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(what) + " is not square");
  }
  if (a.size() == 0) throw DimensionError(std::string(what) + " is empty");
  Eigen::PartialPivLU<Matrix> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > kSingularRcond)) {
    throw SingularMatrixError(std::string(what) + " is singular");
  }
  if (1.0 / rcond > kWarnCondition) {
    std::cerr << "warning: " << what << " is ill-conditioned (cond ~ " << 1.0 / rcond << ")\n";
  }
  return lu;
}

}  // namespace

Matrix solve(const Matrix& a, const Matrix& b, std::string_view what) {
  if (b.rows() != a.rows()) throw DimensionError(std::string(what) + ": rhs has wrong height");
  return factor(a, what).solve(b);
}

Vector solve(const Matrix& a, const Vector& b, std::string_view what) {
  if (b.size() != a.rows()) throw DimensionError(std::string(what) + ": rhs has wrong length");
  return factor(a, what).solve(b);
}

bool is_singular(const Matrix& a) {
  if (a.rows() != a.cols() || a.size() == 0) return true;
  Eigen::PartialPivLU<Matrix> lu(a);
  return !(lu.rcond() > kSingularRcond);
}

Matrix pinv(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  Vector inv = Vector::Zero(sigma.size());
  const double cutoff = sigma.size() > 0 ? kPinvCutoff * sigma(0) : 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) inv(i) = 1.0 / sigma(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double spectral_radius(const Matrix& a) {
  Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace setd::linalg
