#include "mmreg/mm_estimator.hpp"

#include <cmath>
#include <string>

#include "mmreg/linalg.hpp"
#include "mmreg/scale.hpp"

namespace mmreg {

void MMConfig::validate() const {
  if (!(b > 0.0 && b < 1.0)) throw ContractViolation("MMConfig.b must be in (0,1)");
  if (!(c0 > 0.0)) throw ContractViolation("MMConfig.c0 must be positive");
  if (!(c1 > c0))
    throw ContractViolation("MMConfig requires c0 < c1 (got c0 = " +
                            std::to_string(c0) + ", c1 = " + std::to_string(c1) + ")");
  if (!(delta > 0.0)) throw ContractViolation("MMConfig.delta must be positive");
  if (max_iters < 1) throw ContractViolation("MMConfig.max_iters must be >= 1");
}

namespace {

constexpr double kUnitDetTol = 1e-6;

void require_unit_det(const Scatter& Gamma) {
  if (std::abs(Gamma.det() - 1.0) > kUnitDetTol)
    throw ContractViolation("shape matrix must have unit determinant, det = " +
                            std::to_string(Gamma.det()));
}

double rho_sum(const RhoFunction& k, const Vector& scaled_d) {
  return k.mean_rho(scaled_d, 1.0) * static_cast<double>(scaled_d.size());
}

double max_rel_change(const Matrix& now, const Matrix& before) {
  double worst = 0.0;
  for (Index j = 0; j < now.cols(); ++j)
    for (Index i = 0; i < now.rows(); ++i) {
      const double denom = std::max(std::abs(before(i, j)), 1e-12);
      worst = std::max(worst, std::abs(now(i, j) - before(i, j)) / denom);
    }
  return worst;
}

}  // namespace

double objective(const Dataset& data, const CoefMatrix& B, const Scatter& Gamma,
                 double sigma, const RhoFunction& k1) {
  require_unit_det(Gamma);
  if (!(sigma > 0.0)) throw ContractViolation("objective needs sigma > 0");
  const Vector d = mahalanobis_norms(residuals(data, B), Gamma);
  return k1.mean_rho(d, sigma) * static_cast<double>(data.n());
}

std::pair<CoefMatrix, Scatter> irwls_step(const Dataset& data, const CoefMatrix& B,
                                          const Scatter& Sigma, double sigma,
                                          const RhoFunction& k1) {
  if (!(sigma > 0.0)) throw ContractViolation("irwls_step needs sigma > 0");
  const Matrix U = residuals(data, B);
  const Vector d = mahalanobis_norms(U, Sigma);

  Vector w;
  k1.weights(d, 1.0, w);
  Index support = 0;
  for (Index i = 0; i < w.size(); ++i) support += w[i] > 0.0 ? 1 : 0;
  if (support < data.p() + data.q())
    throw NoSupportError("only " + std::to_string(support) +
                         " observations carry positive weight; need at least " +
                         std::to_string(data.p() + data.q()));

  CoefMatrix B_new(data.p(), data.q());
  for (Index j = 0; j < data.q(); ++j)
    B_new.col(j) = weighted_ls_column(data.X(), data.Y().col(j), w);

  const Matrix U_new = residuals(data, B_new);
  const Matrix C = U_new.transpose() * (w.asDiagonal() * U_new);
  const Scatter Gamma_new = det_normalize(C);
  return {std::move(B_new), Scatter(sigma * sigma * Gamma_new.matrix())};
}

FitResult mm_fit(const Dataset& data, const MMConfig& cfg, const SCandidate& initial) {
  cfg.validate();
  require_unit_det(initial.Gamma);
  if (initial.B.rows() != data.p() || initial.B.cols() != data.q())
    throw ContractViolation("initial coefficient matrix has wrong shape");

  const Bisquare k0(cfg.c0);
  const Bisquare k1(cfg.c1);
  const Index q = data.q();

  const Vector d0 = mahalanobis_norms(residuals(data, initial.B), initial.Gamma);
  const ScaleEstimate scale = m_scale(d0, k0, cfg.b);

  if (scale.sigma == 0.0) {
    FitResult r;
    r.B = initial.B;
    r.Gamma = initial.Gamma.matrix();
    r.Sigma = Matrix::Zero(q, q);
    r.sigma = 0.0;
    r.distances = d0;
    r.weights = (d0.array() == 0.0).cast<double>();
    r.iterations = 0;
    r.converged = true;
    r.exact_fit = true;
    return r;
  }

  const double sigma_hat = scale.sigma;
  Scatter Sigma(sigma_hat * sigma_hat * initial.Gamma.matrix());
  CoefMatrix B = initial.B;
  Vector d = d0 / sigma_hat;  // norms with respect to Sigma

  std::vector<double> trace;
  trace.reserve(16);
  trace.push_back(rho_sum(k1, d));

  bool converged = false;
  int iterations = 0;
  while (iterations < cfg.max_iters) {
    auto [B_new, Sigma_new] = irwls_step(data, B, Sigma, sigma_hat, k1);
    const Vector d_new = mahalanobis_norms(residuals(data, B_new), Sigma_new);
    ++iterations;
    trace.push_back(rho_sum(k1, d_new));

    const double change =
        std::max(max_rel_change(B_new, B), max_rel_change(d_new, d));
    B = std::move(B_new);
    Sigma = std::move(Sigma_new);
    d = d_new;
    if (change < cfg.delta) {
      converged = true;
      break;
    }
  }

  FitResult r;
  r.sigma = sigma_hat;
  r.objective_trace = std::move(trace);
  r.iterations = iterations;
  r.converged = converged;

  if (r.objective_trace.back() > r.objective_trace.front() + 1e-10) {
    // The iteration is guaranteed nonincreasing; reaching this branch means
    // numerical pathology, so fall back to the initial estimate to preserve
    // its breakdown behavior.
    r.descent_fallback = true;
    r.B = initial.B;
    r.Gamma = initial.Gamma.matrix();
    r.Sigma = sigma_hat * sigma_hat * initial.Gamma.matrix();
    r.distances = d0 / sigma_hat;
  } else {
    r.B = std::move(B);
    r.Gamma = Sigma.matrix() / (sigma_hat * sigma_hat);
    r.Sigma = Sigma.matrix();
    r.distances = std::move(d);
  }
  k1.weights(r.distances, 1.0, r.weights);
  return r;
}

FitResult mle_fit(const Dataset& data) {
  const Index n = data.n();
  const Index q = data.q();

  CoefMatrix B(data.p(), q);
  const Vector ones = Vector::Ones(n);
  try {
    for (Index j = 0; j < q; ++j)
      B.col(j) = weighted_ls_column(data.X(), data.Y().col(j), ones);
  } catch (const RankDeficiencyError&) {
    throw RankDeficiencyError("design matrix does not have full column rank p = " +
                              std::to_string(data.p()));
  }

  const Matrix U = residuals(data, B);
  const Matrix S = U.transpose() * U / static_cast<double>(n);

  FitResult r;
  r.B = std::move(B);
  r.iterations = 0;
  r.converged = true;
  r.weights = Vector::Ones(n);

  // exact fit: residual scatter negligible relative to the response scale
  const double y_scale = data.Y().squaredNorm() / static_cast<double>(n);
  if (S.cwiseAbs().maxCoeff() <= 1e-24 * std::max(y_scale, 1e-300)) {
    r.Gamma = Matrix::Identity(q, q);
    r.Sigma = Matrix::Zero(q, q);
    r.sigma = 0.0;
    r.distances = Vector::Zero(n);
    r.exact_fit = true;
    return r;
  }

  const Scatter Sigma(S);
  r.sigma = std::pow(Sigma.det(), 1.0 / (2.0 * static_cast<double>(q)));
  r.Gamma = S / (r.sigma * r.sigma);
  r.Sigma = S;
  r.distances = mahalanobis_norms(U, Sigma);
  return r;
}

}  // namespace mmreg
