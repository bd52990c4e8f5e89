#include "uband/disorder.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "uband/rng.hpp"

namespace uband {

namespace {
constexpr std::uint64_t kStreamValue = 0;
constexpr std::uint64_t kStreamComponent = 1;
constexpr std::uint64_t kStreamAtom = 2;

std::string fmt_angle(double a) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", a);
  return buf;
}
}  // namespace

PhaseDistribution PhaseDistribution::uniform() {
  PhaseDistribution d;
  d.kind = Kind::UniformFullTorus;
  return d;
}

PhaseDistribution PhaseDistribution::arc(double center, double halfwidth) {
  PhaseDistribution d;
  d.kind = Kind::UniformArc;
  d.arc_center = reduce_angle(center);
  d.arc_halfwidth = halfwidth;
  d.validate();
  return d;
}

PhaseDistribution PhaseDistribution::atoms(std::vector<double> points,
                                           std::vector<double> weights) {
  PhaseDistribution d;
  d.kind = Kind::Atomic;
  d.atom_points = std::move(points);
  for (double& p : d.atom_points) p = reduce_angle(p);
  d.atom_weights = std::move(weights);
  d.validate();
  return d;
}

PhaseDistribution PhaseDistribution::mixture(double ac_weight, double center,
                                             double halfwidth,
                                             std::vector<double> points,
                                             std::vector<double> weights) {
  PhaseDistribution d;
  d.kind = Kind::Mixture;
  d.ac_weight = ac_weight;
  d.arc_center = reduce_angle(center);
  d.arc_halfwidth = halfwidth;
  d.atom_points = std::move(points);
  for (double& p : d.atom_points) p = reduce_angle(p);
  d.atom_weights = std::move(weights);
  d.validate();
  return d;
}

void PhaseDistribution::validate() const {
  switch (kind) {
    case Kind::UniformFullTorus:
      return;
    case Kind::UniformArc:
      if (!(arc_halfwidth > 0.0) || arc_halfwidth > std::numbers::pi)
        throw std::invalid_argument("arc halfwidth must be in (0, pi]");
      return;
    case Kind::Atomic:
    case Kind::Mixture: {
      if (kind == Kind::Mixture) {
        if (ac_weight < 0.0 || ac_weight > 1.0)
          throw std::invalid_argument("mixture ac-weight must be in [0, 1]");
        if (!(arc_halfwidth > 0.0) || arc_halfwidth > std::numbers::pi)
          throw std::invalid_argument("arc halfwidth must be in (0, pi]");
      }
      if (atom_points.empty() || atom_points.size() != atom_weights.size())
        throw std::invalid_argument("atoms require matching points and weights");
      double total = 0.0;
      for (double w : atom_weights) {
        if (w < 0.0) throw std::invalid_argument("atom weight < 0");
        total += w;
      }
      if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("atom weights must sum to 1");
      return;
    }
  }
  throw std::logic_error("unreachable");
}

double PhaseDistribution::sample(std::uint64_t seed, std::int64_t index) const {
  const double u = uniform01(seed, kStreamValue, index);
  switch (kind) {
    case Kind::UniformFullTorus:
      return reduce_angle(two_pi * u);
    case Kind::UniformArc:
      return reduce_angle(arc_center - arc_halfwidth + 2.0 * arc_halfwidth * u);
    case Kind::Atomic: {
      const double v = uniform01(seed, kStreamAtom, index);
      double acc = 0.0;
      for (std::size_t i = 0; i < atom_points.size(); ++i) {
        acc += atom_weights[i];
        if (v < acc) return atom_points[i];
      }
      return atom_points.back();
    }
    case Kind::Mixture: {
      const double pick = uniform01(seed, kStreamComponent, index);
      if (pick < ac_weight)
        return reduce_angle(arc_center - arc_halfwidth + 2.0 * arc_halfwidth * u);
      const double v = uniform01(seed, kStreamAtom, index);
      double acc = 0.0;
      for (std::size_t i = 0; i < atom_points.size(); ++i) {
        acc += atom_weights[i];
        if (v < acc) return atom_points[i];
      }
      return atom_points.back();
    }
  }
  throw std::logic_error("unreachable");
}

ArcSet PhaseDistribution::support() const {
  std::vector<Arc> arcs;
  switch (kind) {
    case Kind::UniformFullTorus:
      return ArcSet::full_circle();
    case Kind::UniformArc:
      return ArcSet::arc(arc_center, arc_halfwidth);
    case Kind::Atomic:
      for (std::size_t i = 0; i < atom_points.size(); ++i)
        if (atom_weights[i] > 0.0) arcs.push_back({atom_points[i], 0.0});
      return ArcSet(std::move(arcs));
    case Kind::Mixture:
      if (ac_weight > 0.0) arcs.push_back({arc_center, arc_halfwidth});
      for (std::size_t i = 0; i < atom_points.size(); ++i)
        if (atom_weights[i] > 0.0 && ac_weight < 1.0)
          arcs.push_back({atom_points[i], 0.0});
      return ArcSet(std::move(arcs));
  }
  throw std::logic_error("unreachable");
}

namespace {
std::vector<std::pair<double, double>> parse_atom_list(const std::string& s) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    auto at = item.find('@');
    if (at == std::string::npos)
      throw std::invalid_argument("atoms: expected <point>@<weight>");
    out.emplace_back(std::stod(item.substr(0, at)), std::stod(item.substr(at + 1)));
  }
  if (out.empty()) throw std::invalid_argument("atoms: empty list");
  return out;
}
}  // namespace

PhaseDistribution PhaseDistribution::parse(const std::string& spec) {
  if (spec == "uniform") return uniform();
  if (spec.rfind("arc:", 0) == 0) {
    const std::string body = spec.substr(4);
    auto comma = body.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("arc: expected arc:<center>,<halfwidth>");
    return arc(std::stod(body.substr(0, comma)), std::stod(body.substr(comma + 1)));
  }
  if (spec.rfind("atoms:", 0) == 0) {
    auto list = parse_atom_list(spec.substr(6));
    std::vector<double> p, w;
    for (auto& [pt, wt] : list) {
      p.push_back(pt);
      w.push_back(wt);
    }
    return atoms(std::move(p), std::move(w));
  }
  if (spec.rfind("mix:", 0) == 0) {
    // mix:<acw>,arc:<center>,<halfwidth>,atoms:<p1>@<w1>;...
    const std::string body = spec.substr(4);
    auto c1 = body.find(',');
    if (c1 == std::string::npos) throw std::invalid_argument("mix: missing arc part");
    double acw = std::stod(body.substr(0, c1));
    auto arcpos = body.find("arc:", c1);
    auto atomspos = body.find(",atoms:", c1);
    if (arcpos == std::string::npos || atomspos == std::string::npos)
      throw std::invalid_argument("mix: expected mix:<acw>,arc:<...>,atoms:<...>");
    std::string arcbody = body.substr(arcpos + 4, atomspos - arcpos - 4);
    auto comma = arcbody.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("mix: arc part expects <center>,<halfwidth>");
    auto list = parse_atom_list(body.substr(atomspos + 7));
    std::vector<double> p, w;
    for (auto& [pt, wt] : list) {
      p.push_back(pt);
      w.push_back(wt);
    }
    return mixture(acw, std::stod(arcbody.substr(0, comma)),
                   std::stod(arcbody.substr(comma + 1)), std::move(p), std::move(w));
  }
  throw std::invalid_argument("unknown distribution spec: " + spec);
}

std::string PhaseDistribution::spec_string() const {
  std::string s;
  switch (kind) {
    case Kind::UniformFullTorus:
      return "uniform";
    case Kind::UniformArc:
      return "arc:" + fmt_angle(arc_center) + "," + fmt_angle(arc_halfwidth);
    case Kind::Atomic:
      s = "atoms:";
      for (std::size_t i = 0; i < atom_points.size(); ++i) {
        if (i) s += ';';
        s += fmt_angle(atom_points[i]) + "@" + fmt_angle(atom_weights[i]);
      }
      return s;
    case Kind::Mixture:
      s = "mix:" + fmt_angle(ac_weight) + ",arc:" + fmt_angle(arc_center) + "," +
          fmt_angle(arc_halfwidth) + ",atoms:";
      for (std::size_t i = 0; i < atom_points.size(); ++i) {
        if (i) s += ';';
        s += fmt_angle(atom_points[i]) + "@" + fmt_angle(atom_weights[i]);
      }
      return s;
  }
  throw std::logic_error("unreachable");
}

double DisorderRealization::phase(std::int64_t k) const {
  if (k < first || k >= past_end())
    throw std::out_of_range("phase index outside sampled range");
  return phases[static_cast<std::size_t>(k - first)];
}

DisorderRealization sample_phases(const PhaseDistribution& dist,
                                  std::uint64_t seed, std::int64_t first,
                                  std::int64_t count) {
  if (count <= 0) throw std::invalid_argument("empty sampling range");
  dist.validate();
  DisorderRealization omega;
  omega.seed = seed;
  omega.first = first;
  omega.phases.resize(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k)
    omega.phases[static_cast<std::size_t>(k)] = dist.sample(seed, first + k);
  return omega;
}

DisorderRealization shift_realization(const DisorderRealization& omega,
                                      std::int64_t j) {
  // Relabeled range must still overlap the sampled one.
  if (2 * (j < 0 ? -j : j) >= omega.size())
    throw std::out_of_range("shift exceeds available range");
  DisorderRealization out;
  out.seed = omega.seed;
  out.first = omega.first - 2 * j;
  out.phases = omega.phases;
  return out;
}

VerblunskiPhaseSequence correlated_verblunski(const DisorderRealization& omega,
                                              double r) {
  if (!(r > 0.0 && r < 1.0))
    throw std::invalid_argument("Verblunski modulus must be in (0, 1)");
  if (omega.first > 0)
    throw std::invalid_argument("realization must cover indices from 0");
  VerblunskiPhaseSequence v;
  v.modulus = r;
  double acc = 0.0;
  for (std::int64_t k = 0; k < omega.past_end(); ++k) {
    acc = reduce_angle(acc + omega.phase(k));
    v.etas.push_back(acc);
  }
  return v;
}

std::vector<double> verblunski_to_thetas(const VerblunskiPhaseSequence& v) {
  std::vector<double> thetas;
  thetas.reserve(v.etas.size());
  double prev = 0.0;
  for (double eta : v.etas) {
    thetas.push_back(reduce_angle(eta - prev));
    prev = eta;
  }
  return thetas;
}

}  // namespace uband
