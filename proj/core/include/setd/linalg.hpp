#pragma once

#include <string_view>

#include "setd/types.hpp"

namespace setd::linalg {

// Systems whose estimated condition number exceeds this get a warning.
inline constexpr double kWarnCondition = 1e12;
// Reciprocal condition below this is treated as singular.
inline constexpr double kSingularRcond = 1e-15;
// Relative singular-value cutoff of the pseudo-inverse.
inline constexpr double kPinvCutoff = 1e-10;

// Dense LU with partial pivoting. `what` names the matrix in errors and
// warnings. Throws SingularMatrixError.
Matrix solve(const Matrix& a, const Matrix& b, std::string_view what);
Vector solve(const Matrix& a, const Vector& b, std::string_view what);

// True when LU reports the matrix as numerically singular.
bool is_singular(const Matrix& a);

// Moore-Penrose pseudo-inverse; singular values below kPinvCutoff * sigma_max
// are dropped.
Matrix pinv(const Matrix& a);

// Largest singular value.
double spectral_norm(const Matrix& a);

// max |eigenvalue|.
double spectral_radius(const Matrix& a);

}  // namespace setd::linalg
