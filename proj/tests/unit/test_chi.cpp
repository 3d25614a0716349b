#include <doctest.h>

#include <cmath>

#include "mmreg/chi.hpp"
#include "mmreg/errors.hpp"

using namespace mmreg;

TEST_CASE("chi pdf") {
  // q = 1: |N(0,1)| density is 2 phi(v)
  CHECK(chi_pdf(0.0, 1) == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
  CHECK(chi_pdf(1.0, 1) ==
        doctest::Approx(2.0 * std::exp(-0.5) / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
  // q = 2: Rayleigh density v exp(-v^2/2)
  CHECK(chi_pdf(1.3, 2) == doctest::Approx(1.3 * std::exp(-0.5 * 1.69)).epsilon(1e-12));
  CHECK(chi_pdf(-1.0, 3) == 0.0);

  // integrates to one (trapezoid on a fine grid)
  for (int q : {1, 2, 5, 10}) {
    double acc = 0.0;
    const int steps = 20000;
    const double hi = 12.0;
    for (int i = 0; i < steps; ++i) {
      const double a = hi * i / steps, b = hi * (i + 1) / steps;
      acc += 0.5 * (chi_pdf(a, q) + chi_pdf(b, q)) * (b - a);
    }
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("chi-squared cdf and survival are complementary") {
  for (double x : {0.1, 0.5, 1.0, 3.0, 7.5, 20.0})
    for (double dof : {1.0, 2.0, 5.0, 10.0})
      CHECK(chi2_cdf(x, dof) + chi2_survival(x, dof) ==
            doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("chi-squared quantile") {
  // closed form for dof = 2: F(x) = 1 - exp(-x/2)
  CHECK(chi2_quantile(0.5, 2.0) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-9));
  CHECK(std::sqrt(chi2_quantile(0.5, 2.0)) ==
        doctest::Approx(1.177410022515).epsilon(1e-9));
  CHECK(chi2_quantile(0.0, 4.0) == 0.0);

  SUBCASE("round trip with the cdf") {
    for (double p : {0.01, 0.25, 0.5, 0.9, 0.999})
      for (double dof : {1.0, 2.0, 7.0})
        CHECK(chi2_cdf(chi2_quantile(p, dof), dof) ==
              doctest::Approx(p).epsilon(1e-8));
  }
  SUBCASE("monotone in the probability") {
    double prev = 0.0;
    for (double p = 0.05; p < 1.0; p += 0.05) {
      const double x = chi2_quantile(p, 3.0);
      CHECK(x > prev);
      prev = x;
    }
  }
  CHECK_THROWS_AS(chi2_quantile(1.0, 2.0), ContractViolation);
}
