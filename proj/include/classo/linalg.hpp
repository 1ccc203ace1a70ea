#pragma once

#include "classo/matrix.hpp"

namespace classo {

/// Pivots at or below this value are treated as a loss of positive definiteness.
inline constexpr double kCholeskyPivotFloor = 1e-14;
/// Reciprocal condition estimates below this value make `solve` fail.
inline constexpr double kSingularRcond = 1e-12;

struct CholeskyFactor {
    Matrix lower;
};

/// Lower-triangular L with L Lᵀ = sigma. Throws NotPositiveDefinite, or
/// DimensionMismatch if sigma is not square and symmetric within 1e-12.
CholeskyFactor cholesky(const Matrix& sigma);

/// Solves A X = B by LU with partial pivoting. Throws SingularSystem when a
/// pivot vanishes or the reciprocal 1-norm condition number of A falls below
/// `kSingularRcond`.
Matrix solve(const Matrix& a, const Matrix& b);

/// Reciprocal 1-norm condition number of a square matrix (0 if singular).
double rcond(const Matrix& a);

/// Inverse of a symmetric positive definite matrix, symmetrized.
Matrix inverse_spd(const Matrix& a);

}  // namespace classo
