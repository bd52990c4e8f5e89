#pragma once

#include <cmath>
#include <numbers>

namespace uband {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Reduce an angle to the canonical interval [0, 2*pi).
inline double reduce_angle(double a) {
  double r = std::fmod(a, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;  // fmod rounding can land exactly on 2*pi
  return r;
}

/// Distance between two angles on the circle, in [0, pi].
inline double circular_distance(double a, double b) {
  double d = std::fabs(reduce_angle(a) - reduce_angle(b));
  return d > std::numbers::pi ? two_pi - d : d;
}

/// Equality of angles modulo 2*pi within tol.
inline bool angles_equal(double a, double b, double tol = 1e-12) {
  return circular_distance(a, b) <= tol;
}

}  // namespace uband
