#include "mmreg/rho.hpp"

namespace mmreg {

double RhoFunction::mean_rho(const Eigen::VectorXd& v, double s) const noexcept {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += rho(v[i] / s);
  return acc / static_cast<double>(v.size());
}

void RhoFunction::weights(const Eigen::VectorXd& d, double s,
                          Eigen::VectorXd& out) const noexcept {
  out.resize(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) out[i] = weight(d[i] / s);
}

double Bisquare::mean_rho(const Eigen::VectorXd& v, double s) const noexcept {
  const double inv = 1.0 / (c_ * s);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = v[i] * inv;
    const double t = 1.0 - a * a;
    acc += t <= 0.0 ? 1.0 : 1.0 - t * t * t;
  }
  return acc / static_cast<double>(v.size());
}

void Bisquare::weights(const Eigen::VectorXd& d, double s,
                       Eigen::VectorXd& out) const noexcept {
  out.resize(d.size());
  const double inv = 1.0 / (c_ * s);
  const double k = 6.0 / (c_ * c_);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double a = d[i] * inv;
    const double t = 1.0 - a * a;
    out[i] = t <= 0.0 ? 0.0 : k * t * t;
  }
}

}  // namespace mmreg
