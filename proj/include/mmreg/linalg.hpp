#pragma once

#include "mmreg/types.hpp"

namespace mmreg {

/// Residual matrix: row i is y_i - B' x_i. B must be p x q.
Matrix residuals(const Dataset& data, const CoefMatrix& B);

/// Mahalanobis norms d_i = sqrt(u_i' S^{-1} u_i) of the rows of U,
/// computed through the Cholesky factor of S (never an explicit inverse).
Vector mahalanobis_norms(const Matrix& U, const Scatter& S);

/// S / det(S)^{1/q}: the shape matrix with unit determinant.
Scatter det_normalize(const Scatter& S);

/// Overload taking a raw symmetric PD matrix.
Scatter det_normalize(const Matrix& S);

/// argmin_beta sum_i w_i (y_i - x_i' beta)^2 via the weighted normal
/// equations and an LDLT factorization. Weights must be nonnegative.
Vector weighted_ls_column(const Matrix& X, const Vector& y, const Vector& w);

}  // namespace mmreg
