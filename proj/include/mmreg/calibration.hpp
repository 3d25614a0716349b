#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mmreg/rho.hpp"

namespace mmreg {

/// E rho_B(v/c) for v following the chi distribution with q degrees of
/// freedom: the tail mass P(v >= c) in closed form plus adaptive
/// Gauss-Kronrod panels on [0, c]. Absolute accuracy ~1e-10.
double expected_rho(double c, int q);

/// The constant c0 solving expected_rho(c0, q) = b, to 1e-8 in c.
double solve_c0(int q, double b);

/// E psi(v/sigma0)^2 under v ~ chi_q.
double e_psi_sq(const RhoFunction& k, int q, double sigma0 = 1.0);

/// E W*(v/sigma0) under v ~ chi_q, where
///   W*(s) = W(s) + (2/q) W1'(s^2) s^2
/// is the scalar appearing in the derivative of the estimating equations.
double e_wstar(const RhoFunction& k, int q, double sigma0 = 1.0);

/// Asymptotic efficiency of the coefficient estimate with kernel constant
/// c1 relative to the Gaussian MLE:
///   q * (E W*(v))^2 / E psi(v)^2,   v ~ chi_q,
/// assuming the scale kernel is calibrated so sigma0 = 1.
double are(double c1, int q);

/// The constant c1 attaining a target efficiency, to 1e-6 in the
/// efficiency.
double solve_c1(int q, double target_are);

struct CalibrationResult {
  int q = 0;
  double b = 0.5;
  double c0 = 0.0;
  double c1 = 0.0;
  double target_are = 0.0;
  double achieved_are = 0.0;
};

/// Solve both constants for (q, target efficiency, scale level b).
CalibrationResult calibrate(int q, double target_are, double b = 0.5);

/// Tuning constant for the second rho-function of a univariate tau-scale
/// so that the tau-scale attains the given Gaussian asymptotic efficiency.
/// The companion M-scale uses the bisquare c0 for q = 1 at level b.
double tau_rho2_constant(double target_eff, double b = 0.5);

/// Key-value table of precomputed constants: c0 by (q, b) and c1 by
/// (q, target efficiency). Lookups miss to the solvers.
class ConstantsTable {
 public:
  /// The table shipped with the library (b = 0.5; q in {1,...,5,10};
  /// efficiencies 0.80, 0.90, 0.95).
  static const ConstantsTable& builtin();

  static ConstantsTable load(const std::string& path);
  void save(std::ostream& out) const;

  std::optional<double> c0(int q, double b) const;
  std::optional<double> c1(int q, double target_are) const;

  /// c0 from the table when present, otherwise solved.
  double c0_or_solve(int q, double b) const;
  double c1_or_solve(int q, double target_are) const;

  /// Recompute every entry of the builtin grid from scratch.
  static ConstantsTable regenerate();

  struct C0Entry { int q; double b; double value; };
  struct C1Entry { int q; double target_are; double value; };
  std::vector<C0Entry> c0_entries;
  std::vector<C1Entry> c1_entries;
};

}  // namespace mmreg
