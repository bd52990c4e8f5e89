#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "uband/angles.hpp"
#include "uband/fuerstenberg.hpp"
#include "uband/rng.hpp"
#include "uband/transfer.hpp"

using namespace uband;
using Complex = std::complex<double>;
constexpr double pi = std::numbers::pi;

TEST_CASE("real lift basics") {
  SUBCASE("identity lifts to identity") {
    CHECK((tau_lift(Eigen::Matrix2cd::Identity()).matrix -
           Eigen::Matrix4d::Identity())
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  SUBCASE("i * identity lifts to block-diagonal rotations") {
    Eigen::Matrix4d want = Eigen::Matrix4d::Zero();
    want(0, 1) = 1.0;
    want(1, 0) = -1.0;
    want(2, 3) = 1.0;
    want(3, 2) = -1.0;
    CHECK((tau_lift(Complex(0.0, 1.0) * Eigen::Matrix2cd::Identity()).matrix -
           want)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  SUBCASE("multiplicative and inverse-compatible on random inputs") {
    for (int i = 0; i < 100; ++i) {
      Eigen::Matrix2cd a, b;
      for (int e = 0; e < 4; ++e) {
        a(e / 2, e % 2) = Complex(2 * uniform01(7, 0, 8 * i + e) - 1,
                                  2 * uniform01(7, 1, 8 * i + e) - 1);
        b(e / 2, e % 2) = Complex(2 * uniform01(7, 2, 8 * i + e) - 1,
                                  2 * uniform01(7, 3, 8 * i + e) - 1);
      }
      a /= std::sqrt(std::abs(a.determinant()));  // keep inverses tame
      b /= std::sqrt(std::abs(b.determinant()));
      CHECK((tau_lift(a * b).matrix - tau_lift(a).matrix * tau_lift(b).matrix)
                .cwiseAbs()
                .maxCoeff() < 1e-13);
      CHECK((tau_lift(a.inverse()).matrix - tau_lift(a).matrix.inverse())
                .cwiseAbs()
                .maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("structure matrices") {
  for (double t : {0.3, 0.5, 0.8}) {
    const BandParameters p = BandParameters::from_t(t);
    const StructureMatrices s = structure_matrices(p);

    SUBCASE("third diagonal matrix is -(first + identity), exactly") {
      CHECK((s.a2 + s.a0 + Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() ==
            0.0);
    }
    SUBCASE("diagonal one-parameter family") {
      for (int i = 0; i < 64; ++i) {
        const double th = two_pi * i / 64.0;
        const Eigen::Matrix4d want =
            s.a0 + s.a1 * std::sin(th) + s.a2 * std::cos(th);
        CHECK((tau_lift(transfer_matrix(th, th, p).m).matrix - want)
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
      }
    }
    SUBCASE("derivative family vs analytic and finite difference") {
      const double h = 1e-6;
      for (int i = 0; i < 16; ++i) {
        const double th = two_pi * i / 16.0;
        const Eigen::Matrix4d want =
            s.b0 + s.b1 * std::sin(th) + s.b2 * std::cos(th);
        CHECK((tau_lift(transfer_dtheta(th, th, p)).matrix - want)
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
        const Eigen::Matrix4d fd =
            (tau_lift(transfer_matrix(th + h, th, p).m).matrix -
             tau_lift(transfer_matrix(th - h, th, p).m).matrix) /
            (2.0 * h);
        CHECK((fd - want).cwiseAbs().maxCoeff() < 1e-6);
      }
    }
  }
  CHECK_THROWS_AS(structure_matrices(BandParameters::from_t(0.0)),
                  std::domain_error);
}

TEST_CASE("group elements and the positivity certificate") {
  const BandParameters p = BandParameters::from_t(0.5);

  SUBCASE("equal angles collapse everything to the identity") {
    const FuerstenbergCertificate cert = group_elements(1.1, 1.1, p);
    CHECK((cert.c - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((cert.e - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((cert.k - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(cert.trace_k == doctest::Approx(2.0));
    CHECK_FALSE(cert.noncompact_witnessed());
  }
  SUBCASE("antipodal angles maximize the trace") {
    const FuerstenbergCertificate cert = group_elements(0.0, pi, p);
    const double want = 2.0 + 16.0 * p.r * p.r / std::pow(p.t, 4);
    CHECK(cert.trace_k == doctest::Approx(want).epsilon(1e-12));
    CHECK(cert.noncompact_witnessed());
  }
  SUBCASE("closed forms match products on random angles") {
    for (int i = 0; i < 50; ++i) {
      const double th = two_pi * uniform01(3, 0, i);
      const double et = two_pi * uniform01(3, 1, i);
      const FuerstenbergCertificate cert = group_elements(th, et, p);
      for (const auto& [name, defect] : cert.identity_defects) {
        INFO(name);
        CHECK(defect < 1e-10);
      }
      CHECK(cert.max_eigenvalue_k >= 1.0 - 1e-12);
    }
  }
  SUBCASE("quartic vanishing of the trace excess at small separation") {
    const double delta = 1e-3;
    const FuerstenbergCertificate cert = group_elements(1.0 + delta, 1.0, p);
    const double quartic = (p.r * p.r / std::pow(p.t, 4)) * std::pow(delta, 4);
    CHECK(cert.trace_k - 2.0 == doctest::Approx(quartic).epsilon(0.01));
  }
}

TEST_CASE("growth probe") {
  SUBCASE("symmetric coupling oracle") {
    const BandParameters p{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    const double tau = 34.0;  // 2 + 16 r^2 / t^4 at r = t = 1/sqrt(2)
    const double lmax = 0.5 * (tau + std::sqrt(tau * tau - 4.0));
    const double growth = noncompactness_probe(0.0, pi, p, 64);
    CHECK(growth == doctest::Approx(lmax).epsilon(0.02));
    CHECK(growth > 1.0 + 1e-9);
  }
  SUBCASE("monotone approach for a positive definite matrix") {
    const BandParameters p = BandParameters::from_t(0.6);
    double prev = noncompactness_probe(0.4, 2.0, p, 8);
    for (std::int64_t n : {16, 32, 64, 128}) {
      const double cur = noncompactness_probe(0.4, 2.0, p, n);
      CHECK(cur <= prev + 1e-8);
      prev = cur;
    }
  }
  SUBCASE("degenerate input is rejected") {
    CHECK_THROWS_AS(noncompactness_probe(1.0, 1.0, BandParameters::from_t(0.5), 8),
                    std::domain_error);
  }
}

TEST_CASE("certificate JSON report") {
  const FuerstenbergCertificate cert =
      group_elements(0.0, pi, BandParameters::from_t(0.5));
  const std::string json = cert.to_json();
  CHECK(json.find("\"noncompact_witnessed\": true") != std::string::npos);
  CHECK(json.find("\"trace_K\"") != std::string::npos);
  CHECK(json.find("\"defects\"") != std::string::npos);
}
