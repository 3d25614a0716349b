#include "mmreg/linalg.hpp"

#include <cmath>
#include <string>

namespace mmreg {

Matrix residuals(const Dataset& data, const CoefMatrix& B) {
  if (B.rows() != data.p() || B.cols() != data.q())
    throw ContractViolation("coefficient matrix is " + std::to_string(B.rows()) +
                            "x" + std::to_string(B.cols()) + ", expected " +
                            std::to_string(data.p()) + "x" + std::to_string(data.q()));
  return data.Y() - data.X() * B;
}

Vector mahalanobis_norms(const Matrix& U, const Scatter& S) {
  if (U.cols() != S.dim())
    throw ContractViolation("residual columns (" + std::to_string(U.cols()) +
                            ") do not match scatter dimension (" +
                            std::to_string(S.dim()) + ")");
  // d_i^2 = || L^{-1} u_i ||^2 with S = L L'.
  Matrix Z = U.transpose();
  S.llt().matrixL().solveInPlace(Z);
  return Z.colwise().norm();
}

Scatter det_normalize(const Scatter& S) {
  const double q = static_cast<double>(S.dim());
  const double f = std::pow(S.det(), 1.0 / q);
  return Scatter(S.matrix() / f);
}

Scatter det_normalize(const Matrix& S) { return det_normalize(Scatter(S)); }

Vector weighted_ls_column(const Matrix& X, const Vector& y, const Vector& w) {
  if (X.rows() != y.size() || X.rows() != w.size())
    throw ContractViolation("weighted LS inputs have inconsistent row counts");
  if (w.minCoeff() < 0.0)
    throw ContractViolation("weighted LS weights must be nonnegative");

  const Matrix Xw = w.asDiagonal() * X;
  const Matrix G = X.transpose() * Xw;
  Eigen::LDLT<Matrix> ldlt(G);
  const Vector& D = ldlt.vectorD();
  const double d_max = D.maxCoeff();
  if (ldlt.info() != Eigen::Success || !(D.minCoeff() > 1e-12 * d_max) || !(d_max > 0.0))
    throw RankDeficiencyError("weighted design rank-deficient in dimension " +
                              std::to_string(X.cols()));
  return ldlt.solve(Xw.transpose() * y);
}

}  // namespace mmreg
