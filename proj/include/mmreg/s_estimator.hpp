#pragma once

#include <optional>
#include <vector>

#include "mmreg/rho.hpp"
#include "mmreg/rng.hpp"
#include "mmreg/types.hpp"

namespace mmreg {

/// A candidate produced by the subsampling S-estimator: coefficients, a
/// unit-determinant shape matrix and the M-scale of the Mahalanobis norms
/// of the residuals under that shape.
struct SCandidate {
  CoefMatrix B;
  Scatter Gamma;   // det = 1
  double scale = 0.0;
};

struct SConfig {
  int n_subsamples = 2000;
  int n_concentration = 2;
  int n_finalists = 10;
  std::uint64_t seed = 0;
  int max_refine_iters = 50;
  double b = 0.5;  // M-scale level
};

/// Least-squares fit on a subsample of p+q+1 rows; the candidate shape is
/// the det-normalized residual scatter. Returns nullopt when the subsample
/// design or its residual scatter is singular (the candidate is skipped,
/// not an error). The scale field is left at 0; callers attach it.
std::optional<SCandidate> elemental_fit(const Dataset& data,
                                        const std::vector<Index>& idx);

/// One concentration step: weighted least squares and a det-normalized
/// weighted scatter, with weights W0(d_i / sigma) where sigma is the
/// M-scale of the current distances. The M-scale never increases (up to
/// 1e-10 rounding).
SCandidate concentration_step(const Dataset& data, const SCandidate& cand,
                              const RhoFunction& k0, double b);

/// Subsampling S-estimator: n_subsamples elemental candidates, each
/// concentrated n_concentration times; the n_finalists best are iterated
/// to convergence (relative scale change < 1e-7) and the smallest scale
/// wins, ties broken by lowest candidate index.
SCandidate s_estimate(const Dataset& data, const SConfig& cfg,
                      const RhoFunction& k0);

}  // namespace mmreg
