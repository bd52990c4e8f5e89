#pragma once

#include <vector>

#include "uband/angles.hpp"

namespace uband {

/// Closed arc on the unit circle, described by the phase of its center and
/// its angular halfwidth. halfwidth == 0 is a single point; halfwidth >= pi
/// covers the whole circle.
struct Arc {
  double center = 0.0;
  double halfwidth = 0.0;
};

/// Finite union of closed arcs (and isolated points) on the circle,
/// kept canonical: disjoint, sorted by start angle, merged.
class ArcSet {
 public:
  ArcSet() = default;
  explicit ArcSet(std::vector<Arc> arcs);

  static ArcSet full_circle();
  static ArcSet point(double phase) { return ArcSet({Arc{phase, 0.0}}); }
  static ArcSet arc(double center, double halfwidth) {
    return ArcSet({Arc{center, halfwidth}});
  }

  bool is_full() const { return full_; }
  bool empty() const { return !full_ && arcs_.empty(); }
  const std::vector<Arc>& arcs() const { return arcs_; }

  /// True when the angle lies inside some arc fattened by eps.
  bool contains(double angle, double eps = 0.0) const;

  /// Circular distance from the angle to the set (0 if inside).
  double distance(double angle) const;

  /// Minkowski sum on the circle: every pair of arcs adds centers and
  /// halfwidths. Used to rotate Sigma(t) by the support of nu.
  ArcSet minkowski_sum(const ArcSet& other) const;

  /// Total arc length (2*pi when full).
  double measure() const;

 private:
  void canonicalize();

  std::vector<Arc> arcs_;
  bool full_ = false;
};

/// Spectrum of the deterministic operator S(t): a single arc centered at
/// phase 0 with halfwidth arccos(1 - 2 t^2), the full circle at t = 1.
ArcSet spectrum_of_s(double t);

}  // namespace uband
