#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "uband/angles.hpp"
#include "uband/arcs.hpp"
#include "uband/disorder.hpp"

using namespace uband;
constexpr double pi = std::numbers::pi;

TEST_CASE("atomic point mass yields constant phases") {
  const PhaseDistribution d = PhaseDistribution::atoms({0.0}, {1.0});
  const DisorderRealization om = sample_phases(d, 12345, -2, 5);
  for (std::int64_t k = -2; k <= 2; ++k) CHECK(om.phase(k) == 0.0);
}

TEST_CASE("arc samples stay inside the arc") {
  const double delta = 0.4;
  const PhaseDistribution d = PhaseDistribution::arc(0.0, delta);
  const DisorderRealization om = sample_phases(d, 99, 0, 10000);
  for (double th : om.phases)
    CHECK(circular_distance(th, 0.0) <= delta + 1e-15);
}

TEST_CASE("uniform empirical first moment is CLT-small") {
  // Brute-force empirical-moment oracle over 1e5 draws.
  const PhaseDistribution d = PhaseDistribution::uniform();
  const DisorderRealization om = sample_phases(d, 7, 0, 100000);
  std::complex<double> m = 0.0;
  for (double th : om.phases) m += std::exp(std::complex<double>(0.0, th));
  CHECK(std::abs(m) / 1e5 < 0.02);
}

TEST_CASE("sampling is deterministic and order-independent") {
  const PhaseDistribution d = PhaseDistribution::arc(1.0, 0.7);
  const DisorderRealization a = sample_phases(d, 42, -50, 100);
  const DisorderRealization b = sample_phases(d, 42, -50, 100);
  CHECK(a.phases == b.phases);
  // A sub-range sampled independently matches the embedded values bitwise.
  const DisorderRealization c = sample_phases(d, 42, 10, 20);
  for (std::int64_t k = 10; k < 30; ++k) CHECK(c.phase(k) == a.phase(k));
  // Direct per-index draws agree too.
  for (std::int64_t k = -50; k < 50; ++k) CHECK(d.sample(42, k) == a.phase(k));
}

TEST_CASE("empty sampling range is rejected") {
  CHECK_THROWS_AS(sample_phases(PhaseDistribution::uniform(), 1, 0, 0),
                  std::invalid_argument);
}

TEST_CASE("shift relabels by two lattice sites") {
  const DisorderRealization om =
      sample_phases(PhaseDistribution::uniform(), 5, -6, 13);

  SUBCASE("zero shift is the identity") {
    const DisorderRealization s = shift_realization(om, 0);
    CHECK(s.first == om.first);
    CHECK(s.phases == om.phases);
  }
  SUBCASE("shift then unshift round-trips") {
    const DisorderRealization s = shift_realization(shift_realization(om, 1), -1);
    CHECK(s.first == om.first);
    CHECK(s.phases == om.phases);
  }
  SUBCASE("shifted phase at k equals source phase at k + 2j") {
    const DisorderRealization s = shift_realization(om, 1);
    CHECK(s.phase(0) == om.phase(2));
    CHECK(s.phase(-3) == om.phase(-1));
  }
  SUBCASE("shifts compose additively") {
    const DisorderRealization s1 = shift_realization(shift_realization(om, 2), -1);
    const DisorderRealization s2 = shift_realization(om, 1);
    CHECK(s1.first == s2.first);
    CHECK(s1.phases == s2.phases);
  }
  SUBCASE("oversized shift is rejected") {
    CHECK_THROWS_AS(shift_realization(om, 7), std::out_of_range);
  }
}

TEST_CASE("out-of-range phase access throws") {
  const DisorderRealization om =
      sample_phases(PhaseDistribution::uniform(), 5, 0, 4);
  CHECK_THROWS_AS(om.phase(4), std::out_of_range);
  CHECK_THROWS_AS(om.phase(-1), std::out_of_range);
}

TEST_CASE("spec string grammar round-trips") {
  for (const char* spec :
       {"uniform", "arc:0.5,0.25", "atoms:0@0.5;3.1@0.5",
        "mix:0.25,arc:1,0.5,atoms:0@1"}) {
    const PhaseDistribution d = PhaseDistribution::parse(spec);
    const PhaseDistribution d2 = PhaseDistribution::parse(d.spec_string());
    CHECK(d2.kind == d.kind);
    CHECK(d2.arc_center == d.arc_center);
    CHECK(d2.arc_halfwidth == d.arc_halfwidth);
    CHECK(d2.atom_points == d.atom_points);
    CHECK(d2.atom_weights == d.atom_weights);
    CHECK(d2.ac_weight == d.ac_weight);
  }
  CHECK_THROWS_AS(PhaseDistribution::parse("gaussian:1"), std::invalid_argument);
  CHECK_THROWS_AS(PhaseDistribution::parse("arc:1"), std::invalid_argument);
}

TEST_CASE("validation rejects malformed distributions") {
  CHECK_THROWS_AS(PhaseDistribution::arc(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(PhaseDistribution::atoms({0.0, 1.0}, {0.5, 0.6}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PhaseDistribution::atoms({0.0}, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PhaseDistribution::mixture(1.5, 0.0, 0.5, {0.0}, {1.0}),
                  std::invalid_argument);
}

TEST_CASE("every sample lies in the declared support") {
  const PhaseDistribution mix =
      PhaseDistribution::mixture(0.5, 2.0, 0.3, {0.0, 5.0}, {0.25, 0.75});
  const ArcSet sup = mix.support();
  const DisorderRealization om = sample_phases(mix, 11, 0, 5000);
  for (double th : om.phases) CHECK(sup.contains(th, 1e-12));
}

TEST_CASE("support kinds") {
  CHECK(PhaseDistribution::uniform().support().is_full());
  const ArcSet atoms = PhaseDistribution::atoms({1.0, 2.0}, {0.5, 0.5}).support();
  CHECK(atoms.arcs().size() == 2);
  CHECK(atoms.contains(1.0));
  CHECK_FALSE(atoms.contains(1.5));
}

TEST_CASE("cumulative phase sequences") {
  SUBCASE("all-zero input gives all-zero etas") {
    DisorderRealization om;
    om.first = 0;
    om.phases.assign(5, 0.0);
    const VerblunskiPhaseSequence v = correlated_verblunski(om, 0.5);
    for (double eta : v.etas) CHECK(eta == 0.0);
  }
  SUBCASE("quarter-turn increments accumulate") {
    DisorderRealization om;
    om.first = 0;
    om.phases = {pi / 2, pi / 2, pi / 2};
    const VerblunskiPhaseSequence v = correlated_verblunski(om, 0.5);
    CHECK(v.etas[0] == doctest::Approx(pi / 2));
    CHECK(v.etas[1] == doctest::Approx(pi));
    CHECK(v.etas[2] == doctest::Approx(3 * pi / 2));
  }
  SUBCASE("first differences recover the source phases") {
    const DisorderRealization om =
        sample_phases(PhaseDistribution::uniform(), 3, 0, 50);
    const std::vector<double> back =
        verblunski_to_thetas(correlated_verblunski(om, 0.7));
    REQUIRE(back.size() == om.phases.size());
    for (std::size_t i = 0; i < back.size(); ++i)
      CHECK(circular_distance(back[i], om.phases[i]) < 1e-12);
  }
  SUBCASE("modulus outside (0,1) is rejected") {
    DisorderRealization om;
    om.first = 0;
    om.phases.assign(3, 0.0);
    CHECK_THROWS_AS(correlated_verblunski(om, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(correlated_verblunski(om, 0.0), std::invalid_argument);
  }
}

TEST_CASE("arc set algebra") {
  SUBCASE("merging overlapping arcs") {
    const ArcSet s({{0.0, 0.5}, {0.6, 0.3}});
    CHECK(s.arcs().size() == 1);
    CHECK(s.measure() == doctest::Approx(1.4));
  }
  SUBCASE("wrap-around merge") {
    const ArcSet s({{0.1, 0.3}, {two_pi - 0.1, 0.3}});
    CHECK(s.arcs().size() == 1);
    CHECK(s.contains(0.0));
  }
  SUBCASE("minkowski sum adds centers and halfwidths") {
    const ArcSet s = ArcSet::arc(1.0, 0.2).minkowski_sum(ArcSet::arc(0.5, 0.3));
    REQUIRE(s.arcs().size() == 1);
    CHECK(s.arcs()[0].center == doctest::Approx(1.5));
    CHECK(s.arcs()[0].halfwidth == doctest::Approx(0.5));
  }
  SUBCASE("distance") {
    const ArcSet s = ArcSet::arc(0.0, 0.5);
    CHECK(s.distance(0.2) == 0.0);
    CHECK(s.distance(1.0) == doctest::Approx(0.5));
  }
}
