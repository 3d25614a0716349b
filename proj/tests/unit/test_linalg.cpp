#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "mmreg/linalg.hpp"
#include "mmreg/rng.hpp"

using namespace mmreg;

namespace {

Matrix random_nonsingular(Index d, Rng& rng) {
  while (true) {
    Matrix A(d, d);
    rng.fill_normal(A);
    if (std::abs(A.determinant()) > 0.1) return A;
  }
}

Matrix random_spd(Index d, Rng& rng) {
  const Matrix A = random_nonsingular(d, rng);
  return A * A.transpose() + 0.1 * Matrix::Identity(d, d);
}

}  // namespace

TEST_CASE("residuals") {
  Matrix X(4, 2), Y(4, 2);
  X << 1, 0, 0, 1, 1, 1, 2, -1;
  Y << 2, 3, -1, 0, 4, 4, 1, 1;
  const Dataset data(X, Y);

  SUBCASE("zero coefficients give back Y") {
    CHECK(residuals(data, Matrix::Zero(2, 2)) == data.Y());
  }
  SUBCASE("exact fit gives zero residuals") {
    Matrix B(2, 2);
    B << 1, 2, 3, 4;
    const Dataset exact(X, X * B);
    CHECK(residuals(exact, B).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("hand-computed univariate case") {
    Matrix X1(2, 1), Y1(2, 1), B(1, 1);
    X1 << 1, 2;
    Y1 << 3, 5;
    B << 2;
    const Vector r = residuals(Dataset(X1, Y1), B);
    CHECK(r(0) == doctest::Approx(1.0));
    CHECK(r(1) == doctest::Approx(1.0));
  }
  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(residuals(data, Matrix::Zero(3, 3)), ContractViolation);
  }
}

TEST_CASE("mahalanobis norms") {
  SUBCASE("identity scatter is the Euclidean norm") {
    Matrix U(1, 2);
    U << 3, 4;
    const Vector d = mahalanobis_norms(U, Scatter(Matrix::Identity(2, 2)));
    CHECK(d(0) == doctest::Approx(5.0).epsilon(1e-12));
  }
  SUBCASE("zero residual has zero norm") {
    const Vector d =
        mahalanobis_norms(Matrix::Zero(1, 2), Scatter(Matrix::Identity(2, 2)));
    CHECK(d(0) == 0.0);
  }
  SUBCASE("diagonal scatter") {
    Matrix S(2, 2), U(1, 2);
    S << 4, 0, 0, 1;
    U << 2, 1;
    const Vector d = mahalanobis_norms(U, Scatter(S));
    CHECK(d(0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("singular scatter is rejected at construction") {
    Matrix S(2, 2);
    S << 1, 0, 0, 1e-15;
    CHECK_THROWS_AS(Scatter{S}, SingularScatterError);
  }
  SUBCASE("invariant under joint nonsingular transformation") {
    Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
      const Index q = 2 + static_cast<Index>(rng.below(3));
      Matrix U(5, q);
      rng.fill_normal(U);
      const Matrix S = random_spd(q, rng);
      const Matrix A = random_nonsingular(q, rng);
      const Vector d1 = mahalanobis_norms(U, Scatter(S));
      const Vector d2 = mahalanobis_norms(U * A, Scatter(A.transpose() * S * A));
      CHECK((d1 - d2).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("det_normalize") {
  SUBCASE("identity is already normalized") {
    const Scatter G = det_normalize(Matrix::Identity(3, 3));
    CHECK((G.matrix() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("diagonal example") {
    Matrix S(2, 2);
    S << 4, 0, 0, 1;
    const Scatter G = det_normalize(S);
    CHECK(G.matrix()(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(G.matrix()(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(G.det() == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("scalar multiple of the identity") {
    const Scatter G = det_normalize(Matrix(2.0 * Matrix::Identity(3, 3)));
    CHECK((G.matrix() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("idempotent and scale-free") {
    Rng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
      const Index q = 1 + static_cast<Index>(rng.below(4));
      const Matrix S = random_spd(q, rng);
      const double c = std::exp(2.0 * rng.normal());
      const Matrix G1 = det_normalize(S).matrix();
      const Matrix G2 = det_normalize(Matrix(c * S)).matrix();
      const Matrix G3 = det_normalize(G1).matrix();
      CHECK((G1 - G2).cwiseAbs().maxCoeff() < 1e-10 * G1.cwiseAbs().maxCoeff());
      CHECK((G1 - G3).cwiseAbs().maxCoeff() < 1e-10 * G1.cwiseAbs().maxCoeff());
      CHECK(Scatter(G1).det() == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("weighted least squares") {
  SUBCASE("equal weights give the mean") {
    Matrix X(2, 1);
    X << 1, 1;
    Vector y(2), w(2);
    y << 0, 2;
    w << 1, 1;
    CHECK(weighted_ls_column(X, y, w)(0) == doctest::Approx(1.0));
  }
  SUBCASE("weights tilt the average") {
    Matrix X(2, 1);
    X << 1, 1;
    Vector y(2), w(2);
    y << 0, 2;
    w << 3, 1;
    CHECK(weighted_ls_column(X, y, w)(0) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("square nonsingular system interpolates") {
    Rng rng(3);
    Matrix X = random_nonsingular(3, rng);
    Vector beta(3);
    beta << 1.5, -2.0, 0.25;
    const Vector y = X * beta;
    const Vector sol = weighted_ls_column(X, y, Vector::Ones(3));
    CHECK((sol - beta).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("matches the normal-equations oracle with equal weights") {
    Rng rng(17);
    for (int rep = 0; rep < 20; ++rep) {
      Matrix X(12, 3);
      Vector y(12);
      rng.fill_normal(X);
      for (Index i = 0; i < y.size(); ++i) y(i) = rng.normal();
      const Vector sol = weighted_ls_column(X, y, Vector::Ones(12));
      // independent route: explicit inverse of the Gram matrix
      const Matrix G = X.transpose() * X;
      const Vector oracle = G.inverse() * (X.transpose() * y);
      CHECK((sol - oracle).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SUBCASE("rank-deficient design is reported") {
    Matrix X(3, 2);
    X << 1, 2, 2, 4, 3, 6;  // second column is twice the first
    Vector y(3), w(3);
    y << 1, 2, 3;
    w << 1, 1, 1;
    CHECK_THROWS_AS(weighted_ls_column(X, y, w), RankDeficiencyError);
  }
}

TEST_CASE("dataset validation") {
  CHECK_THROWS_AS(Dataset(Matrix::Zero(2, 2), Matrix::Zero(3, 1)),
                  ContractViolation);
  CHECK_THROWS_AS(Dataset(Matrix::Zero(2, 2), Matrix::Zero(2, 1)),
                  ContractViolation);  // n < p + q
  Matrix bad = Matrix::Zero(4, 2);
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(Dataset(bad, Matrix::Zero(4, 1)), ContractViolation);
}
