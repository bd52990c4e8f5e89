#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uband/arcs.hpp"

namespace uband {

/// Phase distribution nu on the torus. Supported kinds: uniform on the full
/// torus, uniform on an arc, purely atomic, and a mixture of an arc part
/// (absolutely continuous) with an atomic part.
///
/// CLI spec-string grammar (angles in radians, decimal):
///   uniform
///   arc:<center>,<halfwidth>
///   atoms:<p1>@<w1>;<p2>@<w2>;...
///   mix:<acw>,arc:<center>,<halfwidth>,atoms:<p1>@<w1>;...
struct PhaseDistribution {
  enum class Kind { UniformFullTorus, UniformArc, Atomic, Mixture };

  Kind kind = Kind::UniformFullTorus;
  double arc_center = 0.0;
  double arc_halfwidth = 0.0;
  std::vector<double> atom_points;
  std::vector<double> atom_weights;
  double ac_weight = 0.0;  // mixture weight of the arc part

  static PhaseDistribution uniform();
  static PhaseDistribution arc(double center, double halfwidth);
  static PhaseDistribution atoms(std::vector<double> points,
                                 std::vector<double> weights);
  static PhaseDistribution mixture(double ac_weight, double center,
                                   double halfwidth,
                                   std::vector<double> points,
                                   std::vector<double> weights);

  static PhaseDistribution parse(const std::string& spec);
  std::string spec_string() const;

  void validate() const;

  /// One i.i.d. draw, a pure function of (seed, index).
  double sample(std::uint64_t seed, std::int64_t index) const;

  /// Topological support as a union of arcs and points.
  ArcSet support() const;
};

/// A sampled realization omega: phases theta_k over a contiguous index range
/// [first, first + size). Reproducible: same (distribution, seed, range)
/// yields identical sequences, independent of evaluation order.
struct DisorderRealization {
  std::uint64_t seed = 0;
  std::int64_t first = 0;
  std::vector<double> phases;

  std::int64_t size() const { return static_cast<std::int64_t>(phases.size()); }
  std::int64_t past_end() const { return first + size(); }
  bool covers(std::int64_t lo, std::int64_t hi) const {  // [lo, hi)
    return lo >= first && hi <= past_end() && lo <= hi;
  }
  double phase(std::int64_t k) const;
};

/// Draw one phase per index in [first, first + count).
DisorderRealization sample_phases(const PhaseDistribution& dist,
                                  std::uint64_t seed, std::int64_t first,
                                  std::int64_t count);

/// Ergodic shift W^j: output phase at index k equals input phase at k + 2j.
DisorderRealization shift_realization(const DisorderRealization& omega, std::int64_t j);

/// Verblunski phase sequence eta_k with constant modulus r: the implied
/// coefficients are alpha_k = r e^{i eta_k}.
struct VerblunskiPhaseSequence {
  std::vector<double> etas;
  double modulus = 0.0;
};

/// eta_k = (theta_0 + ... + theta_k) mod 2*pi, from the phases at indices
/// 0..N-1 of omega. Requires 0 < r < 1.
VerblunskiPhaseSequence correlated_verblunski(const DisorderRealization& omega,
                                              double r);

/// First differences theta_k = eta_k - eta_{k-1} (eta_{-1} = 0), reduced to
/// [0, 2*pi). Inverse of correlated_verblunski.
std::vector<double> verblunski_to_thetas(const VerblunskiPhaseSequence& v);

}  // namespace uband
