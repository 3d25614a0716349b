#include "mmreg/chi.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <string>

#include "mmreg/errors.hpp"

namespace mmreg {

double chi_pdf(double v, int q) {
  if (q < 1) throw ContractViolation("chi distribution needs q >= 1");
  if (v < 0.0) return 0.0;
  if (v == 0.0) return q == 1 ? std::sqrt(2.0 / M_PI) : 0.0;
  const double hq = 0.5 * static_cast<double>(q);
  const double log_pdf = (1.0 - hq) * std::log(2.0) +
                         (static_cast<double>(q) - 1.0) * std::log(v) -
                         0.5 * v * v - std::lgamma(hq);
  return std::exp(log_pdf);
}

double chi2_cdf(double x, double dof) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_survival(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

double chi2_quantile(double prob, double dof) {
  if (!(prob >= 0.0 && prob < 1.0))
    throw ContractViolation("chi-squared quantile needs probability in [0,1), got " +
                            std::to_string(prob));
  if (prob == 0.0) return 0.0;

  // Bracket the monotone CDF, then bisect.
  double lo = 0.0;
  double hi = dof + 1.0;
  while (chi2_cdf(hi, dof) < prob) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_cdf(mid, dof) < prob)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-10 * std::max(1.0, mid) && chi2_cdf(hi, dof) - prob <= 1e-10 &&
        prob - chi2_cdf(lo, dof) <= 1e-10)
      break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace mmreg
