#include "uband/arcs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uband {

ArcSet::ArcSet(std::vector<Arc> arcs) : arcs_(std::move(arcs)) { canonicalize(); }

ArcSet ArcSet::full_circle() {
  ArcSet s;
  s.full_ = true;
  return s;
}

namespace {
struct Interval {
  double start;  // in [0, 2*pi)
  double length; // in [0, 2*pi]
};
}  // namespace

void ArcSet::canonicalize() {
  constexpr double tiny = 1e-15;
  for (const Arc& a : arcs_) {
    if (a.halfwidth < 0.0) throw std::invalid_argument("arc halfwidth < 0");
    if (a.halfwidth >= std::numbers::pi - tiny) {
      full_ = true;
      arcs_.clear();
      return;
    }
  }
  if (arcs_.empty()) return;

  std::vector<Interval> iv;
  iv.reserve(arcs_.size());
  for (const Arc& a : arcs_)
    iv.push_back({reduce_angle(a.center - a.halfwidth), 2.0 * a.halfwidth});
  std::sort(iv.begin(), iv.end(),
            [](const Interval& x, const Interval& y) { return x.start < y.start; });

  // Merge on the line, then handle wrap-around of the last interval.
  std::vector<Interval> merged;
  for (const Interval& v : iv) {
    if (!merged.empty() && v.start <= merged.back().start + merged.back().length + tiny) {
      double end = std::max(merged.back().start + merged.back().length,
                            v.start + v.length);
      merged.back().length = end - merged.back().start;
    } else {
      merged.push_back(v);
    }
  }
  // Wrap: the last interval may spill past 2*pi into the first ones.
  while (merged.size() > 1) {
    double spill = merged.back().start + merged.back().length - two_pi;
    if (spill < merged.front().start - tiny) break;
    double end = std::max(spill, merged.front().start + merged.front().length);
    merged.back().length = end + two_pi - merged.back().start;
    merged.erase(merged.begin());
  }
  if (merged.size() == 1 && merged.front().length >= two_pi - tiny) {
    full_ = true;
    arcs_.clear();
    return;
  }

  arcs_.clear();
  for (const Interval& v : merged)
    arcs_.push_back({reduce_angle(v.start + 0.5 * v.length), 0.5 * v.length});
}

bool ArcSet::contains(double angle, double eps) const {
  if (full_) return true;
  for (const Arc& a : arcs_)
    if (circular_distance(angle, a.center) <= a.halfwidth + eps) return true;
  return false;
}

double ArcSet::distance(double angle) const {
  if (full_) return 0.0;
  if (arcs_.empty()) return std::numbers::pi;
  double best = std::numbers::pi;
  for (const Arc& a : arcs_) {
    double d = circular_distance(angle, a.center) - a.halfwidth;
    best = std::min(best, std::max(0.0, d));
  }
  return best;
}

ArcSet ArcSet::minkowski_sum(const ArcSet& other) const {
  if (full_ || other.full_) return full_circle();
  std::vector<Arc> sum;
  sum.reserve(arcs_.size() * other.arcs_.size());
  for (const Arc& a : arcs_)
    for (const Arc& b : other.arcs_)
      sum.push_back({reduce_angle(a.center + b.center), a.halfwidth + b.halfwidth});
  return ArcSet(std::move(sum));
}

double ArcSet::measure() const {
  if (full_) return two_pi;
  double m = 0.0;
  for (const Arc& a : arcs_) m += 2.0 * a.halfwidth;
  return m;
}

ArcSet spectrum_of_s(double t) {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("t outside [0, 1]");
  double c = std::clamp(1.0 - 2.0 * t * t, -1.0, 1.0);
  double hw = std::acos(c);
  if (hw >= std::numbers::pi) return ArcSet::full_circle();
  return ArcSet::arc(0.0, hw);
}

}  // namespace uband
