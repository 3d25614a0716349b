#include "mmreg/diagnostics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "mmreg/calibration.hpp"
#include "mmreg/chi.hpp"
#include "mmreg/linalg.hpp"

namespace mmreg {

QQData qq_data(const FitResult& fit, int q, double flag_quantile) {
  if (q < 1) throw ContractViolation("qq_data needs q >= 1");
  const Index n = fit.distances.size();
  if (n == 0) throw ContractViolation("qq_data needs a fitted sample");

  QQData out;
  out.sorted_norms = fit.distances;
  std::sort(out.sorted_norms.data(), out.sorted_norms.data() + n);
  out.theoretical.resize(n);
  const double dof = static_cast<double>(q);
  for (Index i = 0; i < n; ++i) {
    const double prob = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    out.theoretical[i] = std::sqrt(chi2_quantile(prob, dof));
  }
  out.flag_threshold = std::sqrt(chi2_quantile(flag_quantile, dof));
  for (Index i = 0; i < n; ++i)
    if (out.sorted_norms[i] > out.flag_threshold) out.flagged.push_back(i);
  return out;
}

void write_qq_csv(const QQData& qq, std::ostream& out) {
  out << "observed,theoretical,flagged\n";
  std::size_t next_flag = 0;
  char buf[80];
  for (Index i = 0; i < qq.sorted_norms.size(); ++i) {
    const bool flagged =
        next_flag < qq.flagged.size() && qq.flagged[next_flag] == i;
    if (flagged) ++next_flag;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", qq.sorted_norms[i],
                  qq.theoretical[i], flagged ? 1 : 0);
    out << buf;
  }
}

Matrix influence_value(const Vector& y0, const Vector& x0, const CoefMatrix& B0,
                       const Scatter& Sigma0, double sigma0, const Matrix& xx_inv,
                       const RhoFunction& k1) {
  if (!(sigma0 > 0.0)) throw ContractViolation("influence_value needs sigma0 > 0");
  if (B0.rows() != x0.size() || B0.cols() != y0.size() ||
      Sigma0.dim() != y0.size() || xx_inv.rows() != x0.size() ||
      xx_inv.cols() != x0.size())
    throw ContractViolation("influence_value dimension mismatch");

  const Vector r0 = y0 - B0.transpose() * x0;
  const Vector z = Sigma0.solve(r0);
  const double d0 = std::sqrt(r0.dot(z));
  const double w = k1.weight(d0 / sigma0);
  if (w == 0.0) return Matrix::Zero(x0.size(), y0.size());

  const int q = static_cast<int>(y0.size());
  const double denom = e_wstar(k1, q, sigma0);
  if (std::abs(denom) < 1e-300)
    throw DegenerateKernelError("E W* vanishes; influence function undefined");
  return (w / denom) * (xx_inv * x0) * r0.transpose();
}

AsymptoticCov asymptotic_covariance(const Dataset& data, const FitResult& fit,
                                    const RhoFunction& k1) {
  if (!fit.converged || !(fit.sigma > 0.0))
    throw ContractViolation("asymptotic covariance needs a converged fit with "
                            "positive scale");
  const Index p = data.p();
  const Index q = data.q();

  const Matrix xx = data.X().transpose() * data.X() / static_cast<double>(data.n());
  Eigen::LDLT<Matrix> ldlt(xx);
  const Vector& D = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || !(D.minCoeff() > 1e-12 * D.maxCoeff()))
    throw RankDeficiencyError("predictor second-moment matrix is singular");
  const Matrix xx_inv = ldlt.solve(Matrix::Identity(p, p));

  const double e_psi2 = e_psi_sq(k1, static_cast<int>(q));
  const double e_ws = e_wstar(k1, static_cast<int>(q));
  if (std::abs(e_ws) < 1e-300)
    throw DegenerateKernelError("E W* = 0; asymptotic covariance undefined");

  AsymptoticCov out;
  out.scalar_factor = e_psi2 / (static_cast<double>(q) * e_ws * e_ws);
  out.V.resize(p * q, p * q);
  for (Index j = 0; j < p; ++j)
    for (Index k = 0; k < p; ++k)
      out.V.block(j * q, k * q, q, q) = xx_inv(j, k) * out.scalar_factor * fit.Sigma;
  return out;
}

namespace {

constexpr double kIncidenceTol = 1e-9;

// Advance a sorted combination of size k over {0, ..., n-1}.
bool next_combination(std::vector<Index>& comb, Index n) {
  const auto k = static_cast<Index>(comb.size());
  for (Index i = k; i-- > 0;) {
    if (comb[static_cast<std::size_t>(i)] < n - (k - i)) {
      ++comb[static_cast<std::size_t>(i)];
      for (Index j = i + 1; j < k; ++j)
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

Index hyperplane_max_count(const Dataset& data, Index max_n) {
  const Index n = data.n();
  if (n > max_n)
    throw SizeError("exact hyperplane enumeration limited to n <= " +
                    std::to_string(max_n) +
                    "; for larger n use the general-position bound p+q-1");
  const Index dim = data.p() + data.q();

  Matrix Z(n, dim);
  Z.leftCols(data.p()) = data.X();
  Z.rightCols(data.q()) = data.Y();

  if (n <= dim - 1) return n;  // few points always share a hyperplane

  std::vector<Index> comb(static_cast<std::size_t>(dim - 1));
  for (Index i = 0; i < dim - 1; ++i) comb[static_cast<std::size_t>(i)] = i;

  Index best = 0;
  do {
    Matrix M(dim - 1, dim);
    for (Index r = 0; r < dim - 1; ++r)
      M.row(r) = Z.row(comb[static_cast<std::size_t>(r)]);

    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double s_max = sv.size() > 0 ? sv[0] : 0.0;
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
      if (sv[i] > 1e-12 * std::max(s_max, 1.0)) ++rank;
    const Index nullity = dim - rank;

    Index count = 0;
    if (nullity == 1) {
      const Vector normal = svd.matrixV().col(dim - 1);
      for (Index i = 0; i < n; ++i)
        if (std::abs(normal.dot(Z.row(i))) <= kIncidenceTol) ++count;
    } else {
      // Degenerate subset: every point inside its span lies on all
      // hyperplanes containing that span.
      const Matrix null_basis = svd.matrixV().rightCols(nullity);
      for (Index i = 0; i < n; ++i)
        if ((null_basis.transpose() * Z.row(i).transpose()).norm() <= kIncidenceTol)
          ++count;
    }
    best = std::max(best, count);
  } while (next_combination(comb, n));

  return best;
}

double breakdown_lower_bound(Index n, Index k_n, double eps_initial) {
  if (n < 1) throw ContractViolation("breakdown bound needs n >= 1");
  if (!(2 * k_n < n))
    throw ContractViolation("breakdown bound needs k_n < n/2, got k_n = " +
                            std::to_string(k_n) + ", n = " + std::to_string(n));
  const double bound =
      static_cast<double>(n / 2 - k_n) / static_cast<double>(n);
  return std::min(eps_initial, bound);
}

}  // namespace mmreg
