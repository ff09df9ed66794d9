#pragma once

// Closed-form bounds for convex radial trajectories y'' - L y^-3 in [0, P y^-2]:
// turning point, parabolic envelope, and the sup-norm lower bounds implied by
// confining all mass inside a ball.

#include <cmath>

#include "vpfocus/error.hpp"
#include "vpfocus/numeric.hpp"

namespace vpfocus::bounds {

struct TurningBound {
  double y_star = 0.0;    // upper bound on the minimum radius
  double t0_lower = 0.0;  // lower bound on the turning time
};

struct SupNormBound {
  double rho_lower = 0.0;
  double e_lower = 0.0;
  double b_used = 0.0;
};

/// Requires L > 0, P >= 0, y0 > 0, y1 < 0; throws ParameterError otherwise.
inline TurningBound lemma1_turning(double L, double P, double y0, double y1) {
  if (!(L > 0.0)) throw ParameterError("lemma1_turning: requires L > 0 (exclude shells with zero angular momentum)");
  if (!(P >= 0.0)) throw ParameterError("lemma1_turning: requires P >= 0");
  if (!(y0 > 0.0)) throw ParameterError("lemma1_turning: requires y0 > 0");
  if (!(y1 < 0.0)) throw ParameterError("lemma1_turning: requires y1 < 0");
  const double barrier = L + P * y0;
  const double y_star = y0 * std::sqrt(barrier / (y0 * y0 * y1 * y1 + barrier));
  return {y_star, (y0 - y_star) / std::abs(y1)};
}

/// (y0 + y1 t)^2 + (L y0^-2 + P y0^-1) t^2, an upper bound on y(t)^2 up to the turning time.
inline double lemma2_envelope(double L, double P, double y0, double y1, double t) {
  const double lin = y0 + y1 * t;
  return lin * lin + (L / (y0 * y0) + P / y0) * t * t;
}

/// Vertex of the envelope parabola: time and value.
struct EnvelopeMinimum {
  double t_min = 0.0;
  double value = 0.0;
};

inline EnvelopeMinimum lemma2_envelope_minimum(double L, double P, double y0, double y1) {
  const double denom = y0 * y0 * y1 * y1 + L + P * y0;
  return {-y1 * y0 * y0 * y0 / denom, y0 * y0 * (L + P * y0) / denom};
}

inline double certified_density_lower(double M, double B) { return 3.0 * M / (4.0 * pi * B * B * B); }

inline double certified_field_lower(double M, double B) { return M / (B * B); }

/// Lower bounds on sup rho and sup |E| when every characteristic sits inside radius B.
inline SupNormBound lemma3_lower_bounds(double M, double B) {
  if (!(M > 0.0)) throw ParameterError("lemma3_lower_bounds: requires M > 0");
  if (!(B > 0.0)) throw ParameterError("lemma3_lower_bounds: requires B > 0");
  return {certified_density_lower(M, B), certified_field_lower(M, B), B};
}

}  // namespace vpfocus::bounds
