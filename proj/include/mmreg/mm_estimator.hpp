#pragma once

#include <utility>
#include <vector>

#include "mmreg/rho.hpp"
#include "mmreg/s_estimator.hpp"
#include "mmreg/types.hpp"

namespace mmreg {

struct MMConfig {
  double b = 0.5;        // M-scale level for the fixed scale
  double c0 = 0.0;       // scale kernel constant (breakdown)
  double c1 = 0.0;       // efficiency kernel constant, must exceed c0
  double delta = 1e-4;   // relative-change stopping threshold
  int max_iters = 500;

  void validate() const;
};

/// Final state of a fit. Sigma = sigma^2 * Gamma with det(Gamma) = 1.
/// distances are the Mahalanobis norms of the residuals with respect to
/// Sigma and weights their W values under the efficiency kernel. For an
/// exact fit (sigma = 0) Sigma is the zero matrix, distances are measured
/// against Gamma, and weights are exact-fit indicators.
struct FitResult {
  CoefMatrix B;
  Matrix Gamma;
  Matrix Sigma;
  double sigma = 0.0;
  Vector distances;
  Vector weights;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  bool exact_fit = false;
  bool descent_fallback = false;  // set when the final objective exceeded
                                  // the initial one and the initial
                                  // estimate was returned instead
};

/// sum_i rho1(d_i(B, Gamma) / sigma), the objective minimized by the
/// reweighting iteration at fixed sigma. Gamma must have det = 1.
double objective(const Dataset& data, const CoefMatrix& B, const Scatter& Gamma,
                 double sigma, const RhoFunction& k1);

/// One reweighting step at fixed sigma: per-column weighted least squares
/// with weights W(d_i(B, Sigma)), then Sigma' = sigma^2 * det-normalized
/// weighted residual scatter.
std::pair<CoefMatrix, Scatter> irwls_step(const Dataset& data,
                                          const CoefMatrix& B,
                                          const Scatter& Sigma, double sigma,
                                          const RhoFunction& k1);

/// Full fit from an initial high-breakdown candidate: the scale is the
/// M-scale of the initial Mahalanobis norms (computed once and frozen),
/// then reweighting iterations run until the largest relative change of
/// the coefficients and of the Mahalanobis norms falls below delta.
FitResult mm_fit(const Dataset& data, const MMConfig& cfg,
                 const SCandidate& initial);

/// Gaussian maximum likelihood: per-column least squares and the residual
/// scatter divided by n, det-split into sigma and Gamma. Weights all one.
FitResult mle_fit(const Dataset& data);

}  // namespace mmreg
