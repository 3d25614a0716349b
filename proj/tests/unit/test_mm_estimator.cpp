#include <doctest.h>

#include <cmath>

#include "mmreg/linalg.hpp"
#include "mmreg/mm_estimator.hpp"
#include "mmreg/scale.hpp"
#include "test_helpers.hpp"

using namespace mmreg;
using mmreg::testing::gaussian_data;
using mmreg::testing::planted_data;

namespace {

MMConfig config_q2() {
  MMConfig cfg;
  cfg.c0 = 2.6608033929;
  cfg.c1 = 4.2821016372;
  return cfg;
}

SCandidate s_init(const Dataset& data, const MMConfig& cfg, std::uint64_t seed = 0) {
  SConfig s_cfg;
  s_cfg.n_subsamples = 400;
  s_cfg.seed = seed;
  return s_estimate(data, s_cfg, Bisquare(cfg.c0));
}

// Frobenius residual of the first estimating equation, normalized per
// observation and per unit scale.
double eq9_residual(const Dataset& data, const FitResult& fit) {
  const Matrix U = residuals(data, fit.B);
  Matrix acc = Matrix::Zero(data.q(), data.p());
  for (Index i = 0; i < data.n(); ++i)
    acc += fit.weights[i] * U.row(i).transpose() * data.X().row(i);
  return acc.norm() / (static_cast<double>(data.n()) * fit.sigma);
}

// Relative error of the second estimating equation (the weighted-scatter
// identity).
double eq10_residual(const Dataset& data, const FitResult& fit) {
  const Matrix U = residuals(data, fit.B);
  Matrix C = Matrix::Zero(data.q(), data.q());
  double denom = 0.0;
  const Bisquare k1(4.2821016372);
  for (Index i = 0; i < data.n(); ++i) {
    C += fit.weights[i] * U.row(i).transpose() * U.row(i);
    denom += k1.psi(fit.distances[i]) * fit.distances[i];
  }
  const Matrix rhs = static_cast<double>(data.q()) * C / denom;
  return (rhs - fit.Sigma).norm() / fit.Sigma.norm();
}

}  // namespace

TEST_CASE("objective") {
  const MMConfig cfg = config_q2();
  const Bisquare k1(cfg.c1);
  Matrix B0(2, 2);
  B0 << 1, 2, 3, 4;

  SUBCASE("exact fit gives zero") {
    const Dataset data = planted_data(20, 2, 2, B0, 0.0, 1);
    CHECK(objective(data, B0, Scatter(Matrix::Identity(2, 2)), 1.0, k1) == 0.0);
  }
  SUBCASE("full saturation gives n") {
    const Dataset data = planted_data(20, 2, 2, B0, 1.0, 2);
    // distances blow up when the coefficients are far off
    const Matrix far = B0.array() + 1e8;
    CHECK(objective(data, far, Scatter(Matrix::Identity(2, 2)), 1.0, k1) ==
          doctest::Approx(20.0));
  }
  SUBCASE("single observation at half range") {
    Matrix X(3, 1), Y(3, 2);
    X << 1, 0, 0;
    Y.setZero();
    Y(0, 0) = 0.5 * cfg.c1;  // distance = 0.5 c1 under the identity shape
    const Dataset data(X, Y);
    const double val =
        objective(data, Matrix::Zero(1, 2), Scatter(Matrix::Identity(2, 2)), 1.0, k1);
    CHECK(val == doctest::Approx(0.578125).epsilon(1e-12));
  }
  SUBCASE("non-unit determinant is rejected") {
    const Dataset data = planted_data(20, 2, 2, B0, 1.0, 3);
    CHECK_THROWS_AS(
        objective(data, B0, Scatter(Matrix(2.0 * Matrix::Identity(2, 2))), 1.0, k1),
        ContractViolation);
  }
}

TEST_CASE("irwls_step") {
  const MMConfig cfg = config_q2();
  const Bisquare k1(cfg.c1);

  SUBCASE("fixed point of the estimating equations maps to itself") {
    const Dataset data = gaussian_data(80, 2, 2, 4);
    MMConfig tight = cfg;
    tight.delta = 1e-12;
    tight.max_iters = 2000;
    const FitResult fit = mm_fit(data, tight, s_init(data, cfg));
    REQUIRE(fit.converged);
    const Scatter Sigma(fit.Sigma);
    const auto [B2, Sigma2] = irwls_step(data, fit.B, Sigma, fit.sigma, k1);
    CHECK((B2 - fit.B).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((Sigma2.matrix() - fit.Sigma).cwiseAbs().maxCoeff() < 1e-8);
  }

  SUBCASE("objective is nonincreasing on random datasets") {
    Rng rng(5);
    for (int rep = 0; rep < 30; ++rep) {
      const Index n = 40 + static_cast<Index>(rng.below(60));
      const Dataset data = gaussian_data(n, 2, 2, 1000 + rep);
      const SCandidate init = s_init(data, cfg, rep);
      const FitResult fit = mm_fit(data, cfg, init);
      for (std::size_t i = 1; i < fit.objective_trace.size(); ++i)
        CHECK(fit.objective_trace[i] <= fit.objective_trace[i - 1] + 1e-10);
    }
  }

  SUBCASE("a saturated observation has zero weight and no influence") {
    Dataset data = gaussian_data(60, 2, 2, 6);
    Matrix X = data.X(), Y = data.Y();
    Y(0, 0) = 1e7;  // gross outlier in the response
    const Dataset dirty(X, Y);
    const FitResult fit = mm_fit(dirty, config_q2(), s_init(dirty, cfg));
    CHECK(fit.weights[0] == 0.0);
    CHECK(fit.distances[0] > cfg.c1);

    // removing the zero-weight row leaves the weighted step unchanged
    const Scatter Sigma(fit.Sigma);
    const auto [B_with, S_with] = irwls_step(dirty, fit.B, Sigma, fit.sigma,
                                             Bisquare(cfg.c1));
    std::vector<Index> keep;
    for (Index i = 1; i < dirty.n(); ++i) keep.push_back(i);
    const Dataset reduced = dirty.rows(keep);
    const auto [B_without, S_without] =
        irwls_step(reduced, fit.B, Sigma, fit.sigma, Bisquare(cfg.c1));
    CHECK((B_with - B_without).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("all weights vanish under a frozen scale") {
    // every distance beyond saturation relative to the fixed sigma
    Matrix X(6, 1), Y(6, 1);
    X << 1, 1, 1, 1, 1, 1;
    Y << 100, 101, 102, 103, 104, 105;
    const Dataset data(X, Y);
    CHECK_THROWS_AS(irwls_step(data, Matrix::Zero(1, 1),
                               Scatter(Matrix::Identity(1, 1)), 1.0,
                               Bisquare(4.685)),
                    NoSupportError);
  }
}

TEST_CASE("mm_fit") {
  const MMConfig cfg = config_q2();

  SUBCASE("noiseless data takes the exact-fit branch") {
    Matrix B0(2, 2);
    B0 << 2, -1, 0.5, 1;
    const Dataset data = planted_data(40, 2, 2, B0, 0.0, 7);
    SCandidate init{B0, Scatter(Matrix::Identity(2, 2)), 0.0};
    const FitResult fit = mm_fit(data, cfg, init);
    CHECK(fit.exact_fit);
    CHECK(fit.sigma == 0.0);
    CHECK(fit.B == B0);
    CHECK(fit.Sigma.cwiseAbs().maxCoeff() == 0.0);
    Index zero_count = 0;
    for (Index i = 0; i < fit.distances.size(); ++i)
      if (fit.distances[i] == 0.0) ++zero_count;
    CHECK(zero_count >= static_cast<Index>(0.5 * static_cast<double>(data.n())));
  }

  SUBCASE("estimating equations hold at convergence") {
    for (int rep = 0; rep < 10; ++rep) {
      const Dataset data = gaussian_data(90, 2, 2, 2000 + rep);
      const FitResult fit = mm_fit(data, cfg, s_init(data, cfg, rep));
      REQUIRE(fit.converged);
      CHECK(eq9_residual(data, fit) <= 10.0 * cfg.delta);
      CHECK(eq10_residual(data, fit) <= 10.0 * cfg.delta);
    }
  }

  SUBCASE("Sigma = sigma^2 Gamma and the shape has unit determinant") {
    const Dataset data = gaussian_data(70, 2, 2, 8);
    const FitResult fit = mm_fit(data, cfg, s_init(data, cfg));
    CHECK((fit.Sigma - fit.sigma * fit.sigma * fit.Gamma).cwiseAbs().maxCoeff() <
          1e-10 * fit.Sigma.cwiseAbs().maxCoeff());
    CHECK(Scatter(fit.Gamma).det() == doctest::Approx(1.0).epsilon(1e-8));
  }

  SUBCASE("weight support: saturated points carry exactly zero weight") {
    Dataset clean = gaussian_data(80, 2, 2, 9);
    Matrix X = clean.X(), Y = clean.Y();
    for (Index i = 0; i < 8; ++i) Y(i, 0) = 1e6 + static_cast<double>(i);
    const Dataset data(X, Y);
    const FitResult fit = mm_fit(data, cfg, s_init(data, cfg));
    for (Index i = 0; i < data.n(); ++i) {
      if (fit.distances[i] >= cfg.c1) CHECK(fit.weights[i] == 0.0);
      if (fit.weights[i] == 0.0) CHECK(fit.distances[i] >= cfg.c1);
    }
  }

  SUBCASE("equivariance under response transformation") {
    const Dataset data = gaussian_data(90, 2, 2, 10);
    Matrix A(2, 2), D(2, 2);
    A << 1.5, 0.2, -0.4, 2.0;
    D << 0.5, -1.0, 2.0, 0.0;
    const double c = -1.7;

    // the fixed point is equivariant; iterate tightly so the stopping rule
    // does not blur it
    MMConfig cfg = config_q2();
    cfg.delta = 1e-9;
    cfg.max_iters = 3000;

    const SCandidate init = s_init(data, cfg);
    const FitResult fit = mm_fit(data, cfg, init);

    const Dataset transformed(data.X(), Matrix((data.Y() + data.X() * D) * A * c));
    const Matrix B_init_t = (init.B + D) * A * c;
    const Matrix AtGA = A.transpose() * init.Gamma.matrix() * A;
    const SCandidate init_t{B_init_t, det_normalize(AtGA), 0.0};
    const FitResult fit_t = mm_fit(transformed, cfg, init_t);

    const Matrix B_expected = (fit.B + D) * A * c;
    const Matrix Sigma_expected = c * c * A.transpose() * fit.Sigma * A;
    CHECK((fit_t.B - B_expected).cwiseAbs().maxCoeff() <
          1e-6 * std::max(1.0, B_expected.cwiseAbs().maxCoeff()));
    CHECK((fit_t.Sigma - Sigma_expected).cwiseAbs().maxCoeff() <
          1e-6 * Sigma_expected.cwiseAbs().maxCoeff());
  }

  SUBCASE("max_iters exhaustion reports converged = false") {
    const Dataset data = gaussian_data(60, 2, 2, 11);
    MMConfig strict = cfg;
    strict.max_iters = 1;
    strict.delta = 1e-14;
    const FitResult fit = mm_fit(data, strict, s_init(data, cfg));
    CHECK(!fit.converged);
    CHECK(fit.iterations == 1);
  }

  SUBCASE("invalid configurations are rejected") {
    MMConfig bad = cfg;
    bad.c1 = bad.c0;  // must be strictly larger
    const Dataset data = gaussian_data(40, 2, 2, 12);
    const SCandidate init = s_init(data, cfg);
    CHECK_THROWS_AS(mm_fit(data, bad, init), ContractViolation);
  }
}

TEST_CASE("mle_fit") {
  SUBCASE("exact fit") {
    Matrix B0(2, 2);
    B0 << 1, 0, 0, 1;
    const Dataset data = planted_data(30, 2, 2, B0, 0.0, 13);
    const FitResult fit = mle_fit(data);
    CHECK(fit.exact_fit);
    CHECK((fit.B - B0).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(fit.Sigma.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("univariate interpolation") {
    Matrix X(2, 1), Y(2, 1);
    X << 1, 2;
    Y << 1, 2;
    // n = p + q exactly
    const FitResult fit = mle_fit(Dataset(X, Y));
    CHECK(fit.B(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.sigma == 0.0);
  }

  SUBCASE("weights are all one and Sigma is the residual scatter over n") {
    const Dataset data = gaussian_data(50, 2, 2, 14);
    const FitResult fit = mle_fit(data);
    CHECK(fit.weights.minCoeff() == 1.0);
    const Matrix U = residuals(data, fit.B);
    const Matrix S = U.transpose() * U / 50.0;
    CHECK((fit.Sigma - S).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("rank-deficient design errors") {
    Matrix X(10, 2), Y(10, 1);
    for (Index i = 0; i < 10; ++i) {
      X(i, 0) = static_cast<double>(i);
      X(i, 1) = 2.0 * static_cast<double>(i);
      Y(i, 0) = static_cast<double>(i);
    }
    CHECK_THROWS_AS(mle_fit(Dataset(X, Y)), RankDeficiencyError);
  }
}
