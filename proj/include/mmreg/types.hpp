#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "mmreg/errors.hpp"

namespace mmreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Coefficient matrix of the multivariate linear model, p x q.
using CoefMatrix = Matrix;

/// A regression sample: X holds one predictor row per observation (n x p),
/// Y one response row per observation (n x q). Storage is dense
/// column-major (Eigen default). Construction validates that all entries
/// are finite and that n >= p + q.
class Dataset {
 public:
  Dataset(Matrix X, Matrix Y);

  const Matrix& X() const noexcept { return X_; }
  const Matrix& Y() const noexcept { return Y_; }
  Index n() const noexcept { return X_.rows(); }
  Index p() const noexcept { return X_.cols(); }
  Index q() const noexcept { return Y_.cols(); }

  /// Sub-sample restricted to the given row indices.
  Dataset rows(const std::vector<Index>& idx) const;

 private:
  Matrix X_;
  Matrix Y_;
};

/// Symmetric positive definite q x q matrix with a cached determinant and
/// Cholesky factor. Construction rejects asymmetric input (relative
/// asymmetry above 1e-12) and near-singular input (min eigenvalue
/// <= 1e-12 * max eigenvalue).
class Scatter {
 public:
  explicit Scatter(const Matrix& S);

  const Matrix& matrix() const noexcept { return S_; }
  Index dim() const noexcept { return S_.rows(); }
  double det() const noexcept { return det_; }
  const Eigen::LLT<Matrix>& llt() const noexcept { return llt_; }

  /// S^{-1} * rhs via the cached Cholesky factor.
  Matrix solve(const Matrix& rhs) const { return llt_.solve(rhs); }

 private:
  Matrix S_;
  double det_;
  Eigen::LLT<Matrix> llt_;
};

/// Residual matrix together with the Mahalanobis norms of its rows.
struct ResidualSet {
  Matrix U;  // n x q
  Vector d;  // n, nonnegative
};

}  // namespace mmreg
