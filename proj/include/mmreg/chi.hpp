#pragma once

namespace mmreg {

/// Density of the chi distribution with q degrees of freedom (the law of
/// the Euclidean norm of a standard q-variate normal vector), evaluated
/// through log-gamma for stability.
double chi_pdf(double v, int q);

/// CDF of the chi-squared distribution with dof degrees of freedom.
double chi2_cdf(double x, double dof);

/// Survival function 1 - CDF, computed directly from the upper regularized
/// incomplete gamma (no cancellation).
double chi2_survival(double x, double dof);

/// Quantile of the chi-squared distribution, found by monotone
/// bracketing + bisection on the regularized incomplete gamma to an
/// absolute tolerance of 1e-10 in probability.
double chi2_quantile(double prob, double dof);

}  // namespace mmreg
