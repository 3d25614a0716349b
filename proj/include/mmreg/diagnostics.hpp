#pragma once

#include <iosfwd>
#include <vector>

#include "mmreg/mm_estimator.hpp"
#include "mmreg/rho.hpp"
#include "mmreg/types.hpp"

namespace mmreg {

/// Sorted residual norms paired with root chi-squared quantiles at the
/// plotting positions (i - 0.5)/n, plus the indices (into the sorted
/// vector) exceeding the flagging quantile.
struct QQData {
  Vector sorted_norms;
  Vector theoretical;
  std::vector<Index> flagged;
  double flag_threshold = 0.0;
};

QQData qq_data(const FitResult& fit, int q, double flag_quantile = 0.999);

/// CSV export: header "observed,theoretical,flagged", one row per point.
void write_qq_csv(const QQData& qq, std::ostream& out);

/// Influence of a single observation (y0, x0) on the coefficient
/// functional at the model (B0, Sigma0, sigma0):
///   IF = W(d0/sigma0) / E W*(v/sigma0) * xx_inv * x0 * (y0 - B0'x0)'
/// with d0 the Mahalanobis norm of the residual under Sigma0 and the
/// expectation taken over v ~ chi_q by quadrature. Returns a p x q matrix;
/// it vanishes at zero residual and on the saturation set d0 >= c1*sigma0.
Matrix influence_value(const Vector& y0, const Vector& x0, const CoefMatrix& B0,
                       const Scatter& Sigma0, double sigma0,
                       const Matrix& xx_inv, const RhoFunction& k1);

/// Asymptotic covariance of vec(B') under the Gaussian working model:
///   V = scalar_factor * (X'X/n)^{-1} (x) Sigma_hat
/// with scalar_factor = E psi^2 / (q (E W*)^2); blocks of V are indexed by
/// predictor pairs.
struct AsymptoticCov {
  Matrix V;               // pq x pq
  double scalar_factor = 0.0;
};

AsymptoticCov asymptotic_covariance(const Dataset& data, const FitResult& fit,
                                    const RhoFunction& k1);

/// Exact maximum number of joint observations (y_i', x_i') lying on one
/// hyperplane through the origin of R^{p+q}, by enumerating the
/// hyperplanes spanned by every (p+q-1)-subset. Cost grows like
/// n^(p+q-1); refuses n beyond max_n.
Index hyperplane_max_count(const Dataset& data, Index max_n = 60);

/// Lower bound on the finite-sample breakdown point:
/// min(eps_initial, (floor(n/2) - k_n)/n).
double breakdown_lower_bound(Index n, Index k_n, double eps_initial);

}  // namespace mmreg
