#include "mmreg/scale.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mmreg {

namespace {

// Counts exact zeros and the smallest positive / largest entries.
struct Summary {
  Index zeros = 0;
  double min_pos = std::numeric_limits<double>::infinity();
  double max = 0.0;
};

Summary summarize(const Vector& v) {
  Summary s;
  for (Index i = 0; i < v.size(); ++i) {
    const double x = v[i];
    if (!(x >= 0.0) || !std::isfinite(x))
      throw ContractViolation("scale input must be nonnegative and finite, got " +
                              std::to_string(x));
    if (x == 0.0) {
      ++s.zeros;
    } else {
      s.min_pos = std::min(s.min_pos, x);
      s.max = std::max(s.max, x);
    }
  }
  return s;
}

}  // namespace

ScaleEstimate m_scale(const Vector& v, const RhoFunction& k0, double b) {
  if (v.size() == 0) throw ContractViolation("scale input is empty");
  if (!(b > 0.0 && b < 1.0)) throw ContractViolation("scale level b must be in (0,1)");

  const auto n = static_cast<double>(v.size());
  const Summary sum = summarize(v);
  if (static_cast<double>(sum.zeros) >= n * (1.0 - b)) return ScaleEstimate{0.0, 0, 0.0};

  // g(s) = mean rho(v/s) - b is continuous and nonincreasing with
  // g(0+) > 0 (the zero rule was already handled), g(inf) = -b < 0.
  const auto g = [&](double s) { return k0.mean_rho(v, s) - b; };

  double lo = sum.min_pos / (10.0 * k0.c());
  double hi = sum.max * 10.0 / k0.c();
  int iters = 0;
  while (g(lo) <= 0.0) {
    lo /= 8.0;
    if (++iters > 2000) throw Error("scale_solver", "failed to bracket from below");
  }
  while (g(hi) >= 0.0) {
    hi *= 8.0;
    if (++iters > 2000) throw Error("scale_solver", "failed to bracket from above");
  }

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    ++iters;
    if (gm > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-11 * mid) break;
  }
  mid = 0.5 * (lo + hi);

  ScaleEstimate est{mid, iters, g(mid)};
  if (std::abs(est.residual) > 1e-9)
    throw Error("scale_solver", "equation residual " + std::to_string(est.residual) +
                                    " exceeds tolerance");
  return est;
}

double tau_scale(const Vector& v, const RhoFunction& k0, const RhoFunction& k2,
                 double b) {
  const ScaleEstimate s = m_scale(v, k0, b);
  if (s.sigma == 0.0) return 0.0;
  return s.sigma * std::sqrt(k2.mean_rho(v, s.sigma));
}

}  // namespace mmreg
