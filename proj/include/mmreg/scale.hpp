#pragma once

#include "mmreg/rho.hpp"
#include "mmreg/types.hpp"

namespace mmreg {

/// Result of the M-scale solver.
struct ScaleEstimate {
  double sigma = 0.0;    // the scale, >= 0
  int iterations = 0;    // bisection iterations used
  double residual = 0.0; // mean rho(v/sigma) - b at the returned sigma
};

/// M-estimate of scale: the root of mean_i rho0(v_i / s) = b, or 0 when at
/// least n(1-b) of the v_i are zero. Inputs must be nonnegative and finite.
/// The root is bracketed and bisected; when sigma > 0 the equation residual
/// is below 1e-9.
ScaleEstimate m_scale(const Vector& v, const RhoFunction& k0, double b);

/// tau-scale: sqrt of s^2(v) * mean_i rho2(|v_i| / s(v)) with s the M-scale
/// under k0. Returns 0 when the M-scale is 0.
double tau_scale(const Vector& v, const RhoFunction& k0, const RhoFunction& k2,
                 double b);

}  // namespace mmreg
