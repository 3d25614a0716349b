#pragma once

#include <Eigen/Core>

#include "mmreg/errors.hpp"

namespace mmreg {

/// A bounded rho-function with tuning constant c: even, nondecreasing in
/// |u|, rho(0) = 0, sup rho = 1, constant 1 beyond c. Implementations
/// supply the derivative psi, the weight W(u) = psi(u)/u (extended by its
/// limit at 0) and the derivative of W1(t) = W(sqrt(t)).
class RhoFunction {
 public:
  virtual ~RhoFunction() = default;

  virtual double c() const noexcept = 0;
  virtual double rho(double u) const noexcept = 0;
  virtual double psi(double u) const noexcept = 0;
  virtual double weight(double u) const noexcept = 0;
  virtual double w1_prime(double t) const noexcept = 0;

  /// mean_i rho(v_i / s). Batch form used by the scale solvers.
  virtual double mean_rho(const Eigen::VectorXd& v, double s) const noexcept;

  /// out_i = weight(d_i / s).
  virtual void weights(const Eigen::VectorXd& d, double s,
                       Eigen::VectorXd& out) const noexcept;
};

/// Tukey's bisquare function rescaled by c:
///   rho(u) = 1 - (1 - (u/c)^2)^3   for |u| <= c, 1 otherwise.
class Bisquare final : public RhoFunction {
 public:
  explicit Bisquare(double c) : c_(c) {
    if (!(c > 0.0)) throw ContractViolation("bisquare tuning constant must be > 0");
  }

  double c() const noexcept override { return c_; }

  double rho(double u) const noexcept override {
    const double a = u / c_;
    const double t = 1.0 - a * a;
    return t <= 0.0 ? 1.0 : 1.0 - t * t * t;
  }

  double psi(double u) const noexcept override {
    const double a = u / c_;
    const double t = 1.0 - a * a;
    return t <= 0.0 ? 0.0 : 6.0 * u / (c_ * c_) * t * t;
  }

  double weight(double u) const noexcept override {
    const double a = u / c_;
    const double t = 1.0 - a * a;
    return t <= 0.0 ? 0.0 : 6.0 / (c_ * c_) * t * t;
  }

  double w1_prime(double t) const noexcept override {
    const double c2 = c_ * c_;
    return t >= c2 ? 0.0 : -12.0 / (c2 * c2) * (1.0 - t / c2);
  }

  double mean_rho(const Eigen::VectorXd& v, double s) const noexcept override;
  void weights(const Eigen::VectorXd& d, double s,
               Eigen::VectorXd& out) const noexcept override;

 private:
  double c_;
};

}  // namespace mmreg
