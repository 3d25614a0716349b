#include "mmreg/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace mmreg {

Dataset::Dataset(Matrix X, Matrix Y) : X_(std::move(X)), Y_(std::move(Y)) {
  if (X_.rows() != Y_.rows())
    throw ContractViolation("dataset row counts differ: X has " +
                            std::to_string(X_.rows()) + ", Y has " +
                            std::to_string(Y_.rows()));
  if (X_.cols() < 1 || Y_.cols() < 1)
    throw ContractViolation("dataset needs at least one predictor and one response");
  if (X_.rows() < X_.cols() + Y_.cols())
    throw ContractViolation("dataset needs n >= p + q, got n = " +
                            std::to_string(X_.rows()));
  if (!X_.allFinite() || !Y_.allFinite())
    throw ContractViolation("dataset contains non-finite entries");
}

Dataset Dataset::rows(const std::vector<Index>& idx) const {
  Matrix X(static_cast<Index>(idx.size()), p());
  Matrix Y(static_cast<Index>(idx.size()), q());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    X.row(static_cast<Index>(i)) = X_.row(idx[i]);
    Y.row(static_cast<Index>(i)) = Y_.row(idx[i]);
  }
  return Dataset(std::move(X), std::move(Y));
}

namespace {
constexpr double kSymmetryTol = 1e-12;
constexpr double kSingularRatio = 1e-12;
}  // namespace

Scatter::Scatter(const Matrix& S) {
  if (S.rows() != S.cols())
    throw ContractViolation("scatter matrix must be square");
  if (!S.allFinite())
    throw ContractViolation("scatter matrix has non-finite entries");

  const double scale = S.cwiseAbs().maxCoeff();
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && asym > kSymmetryTol * scale)
    throw ContractViolation("scatter matrix is not symmetric (relative asymmetry " +
                            std::to_string(asym / scale) + ")");

  S_ = 0.5 * (S + S.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(S_, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  const double ev_min = ev.minCoeff();
  const double ev_max = ev.maxCoeff();
  if (!(ev_min > kSingularRatio * ev_max) || !(ev_max > 0.0))
    throw SingularScatterError("scatter matrix numerically singular (eigenvalue range [" +
                               std::to_string(ev_min) + ", " + std::to_string(ev_max) + "])");

  det_ = ev.prod();
  llt_.compute(S_);
  if (llt_.info() != Eigen::Success)
    throw SingularScatterError("Cholesky factorization of scatter matrix failed");
}

}  // namespace mmreg
