#pragma once

// Standard Gaussian helpers shared by the kernel, increment-law and
// simulation code.

#include <cmath>
#include <numbers>

namespace brpv {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;
inline constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;

inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Phi(x). Computed from erfc so that normal_cdf(x) == normal_sf(-x) bitwise.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

/// 1 - Phi(x), accurate in the upper tail.
inline double normal_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

/// Mills ratio (1 - Phi(u)) / phi(u).
///
/// Direct ratio for u <= 8; above that the three-term asymptotic expansion
/// (1/u)(1 - 1/u^2 + 3/u^4), whose relative error there is below 6e-5 while
/// phi(u) < 6e-15.
inline double mills_ratio(double u) {
  if (u <= 8.0) {
    return normal_sf(u) / normal_pdf(u);
  }
  const double inv2 = 1.0 / (u * u);
  return (1.0 - inv2 + 3.0 * inv2 * inv2) / u;
}

/// Inverse of the upper tail: returns x with 1 - Phi(x) = q, q in (0, 1).
double normal_sf_inverse(double q);

}  // namespace brpv
