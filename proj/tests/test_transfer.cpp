#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "uband/angles.hpp"
#include "uband/disorder.hpp"
#include "uband/operator_core.hpp"
#include "uband/rng.hpp"
#include "uband/transfer.hpp"

using namespace uband;
using Complex = std::complex<double>;
constexpr double pi = std::numbers::pi;

namespace {
DisorderRealization constant_phases(double value, std::int64_t first,
                                    std::int64_t count) {
  DisorderRealization om;
  om.first = first;
  om.phases.assign(static_cast<std::size_t>(count), value);
  return om;
}
}  // namespace

TEST_CASE("transfer matrix closed-form anchors") {
  const BandParameters p = BandParameters::from_t(0.5);
  SUBCASE("T(0,0) = -identity") {
    const Eigen::Matrix2cd m = transfer_matrix(0.0, 0.0, p).m;
    CHECK((m + Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("T(0,pi) lower-triangular form") {
    const Eigen::Matrix2cd m = transfer_matrix(0.0, pi, p).m;
    CHECK(std::abs(m(0, 0) - Complex(1.0)) < 1e-15);
    CHECK(std::abs(m(0, 1)) < 1e-15);
    CHECK(std::abs(m(1, 0) - Complex(2.0 * p.r / p.t)) < 1e-15);
    CHECK(std::abs(m(1, 1) + Complex(1.0)) < 1e-15);
    CHECK(std::abs(m.determinant() + Complex(1.0)) < 1e-15);  // e^{-i pi}
  }
  SUBCASE("determinant is e^{i(theta - eta)}") {
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double th = two_pi * uniform01(1, 0, i);
      const double et = two_pi * uniform01(1, 1, i);
      worst = std::max(worst,
                       std::abs(transfer_matrix(th, et, p).m.determinant() -
                                std::polar(1.0, th - et)));
    }
    CHECK(worst < 1e-14);
  }
  SUBCASE("degenerate couplings are rejected") {
    CHECK_THROWS_AS(transfer_matrix(0.0, 0.0, BandParameters::from_t(0.0)),
                    std::domain_error);
    CHECK_THROWS_AS(transfer_matrix(0.0, 0.0, BandParameters::from_t(1.0)),
                    std::domain_error);
  }
}

TEST_CASE("cocycle products") {
  const BandParameters p = BandParameters::from_t(0.5);
  const DisorderRealization om =
      sample_phases(PhaseDistribution::uniform(), 4, -40, 80);

  SUBCASE("zero steps give the identity") {
    const CocycleProduct c = cocycle(om, 0.3, 0, Direction::Forward, p);
    CHECK(c.steps == 0);
    CHECK(c.log_norm_sum == 0.0);
    CHECK((c.product - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("composing with stepwise inverses recovers the identity") {
    // Keep the product short: the growth rate sets the condition number of
    // the undo, and the contracting direction must stay above roundoff.
    const BandParameters mild = BandParameters::from_t(0.9);
    const std::int64_t k = 12;
    const CocycleProduct fwd = cocycle(om, 0.3, k, Direction::Forward, mild);
    Eigen::Matrix2cd undo = fwd.product;
    for (std::int64_t j = k - 1; j >= 0; --j)
      undo = transfer_matrix(om.phase(2 * j) + 0.3, om.phase(2 * j + 1) + 0.3,
                             mild)
                 .m.inverse() *
             undo;
    undo *= std::exp(fwd.log_norm_sum);
    CHECK((undo - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("constant zero phases give powers of -identity") {
    const CocycleProduct c =
        cocycle(constant_phases(0.0, 0, 6), 0.0, 3, Direction::Forward, p);
    const Eigen::Matrix2cd full = std::exp(c.log_norm_sum) * c.product;
    CHECK((full + Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("determinant modulus is preserved through renormalization") {
    // Short enough that det(renormalized product) = e^{-2L} stays well above
    // the roundoff floor of a 2x2 determinant.
    const CocycleProduct c = cocycle(om, 0.1, 4, Direction::Forward, p);
    CHECK(std::abs(c.log_abs_det_unrenormalized()) < 1e-6);
  }
  SUBCASE("a million renormalized steps stay normalized and finite") {
    const DisorderRealization big =
        sample_phases(PhaseDistribution::uniform(), 2, 0, 2000000);
    const CocycleProduct c = cocycle(big, 0.1, 1000000, Direction::Forward, p);
    CHECK(std::isfinite(c.log_norm_sum));
    CHECK(c.log_norm_sum > 0.0);
    CHECK(c.product.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("missing phases are detected") {
    CHECK_THROWS_AS(cocycle(om, 0.0, 100, Direction::Forward, p),
                    std::out_of_range);
    CHECK_THROWS_AS(cocycle(om, 0.0, 100, Direction::Backward, p),
                    std::out_of_range);
  }
}

TEST_CASE("growth-rate estimator") {
  const BandParameters p = BandParameters::from_t(0.5);
  LyapunovOptions opts;
  opts.steps = 5000;
  opts.runs = 8;

  SUBCASE("parallel and serial reference agree bitwise") {
    const PhaseDistribution nu = PhaseDistribution::uniform();
    const LyapunovPair a = estimate_lyapunov(nu, p, 0.7, opts, 99);
    const LyapunovPair b = estimate_lyapunov_serial(nu, p, 0.7, opts, 99);
    CHECK(a.forward.gamma_hat == b.forward.gamma_hat);
    CHECK(a.forward.std_error == b.forward.std_error);
    CHECK(a.backward.gamma_hat == b.backward.gamma_hat);
    CHECK(a.backward.std_error == b.backward.std_error);
  }
  SUBCASE("spectral shift equals pre-shifted phases") {
    const double alpha = 0.9;
    const PhaseDistribution at0 = PhaseDistribution::atoms({1.1}, {1.0});
    const PhaseDistribution at1 =
        PhaseDistribution::atoms({reduce_angle(1.1 + alpha)}, {1.0});
    const LyapunovPair a = estimate_lyapunov(at0, p, alpha, opts, 5);
    // Atomic sampling ignores the uniform variate, so pre-shifting the atom
    // is exactly the same sequence of transfer matrices.
    const LyapunovPair b = estimate_lyapunov(at1, p, 0.0, opts, 5);
    CHECK(a.forward.gamma_hat == b.forward.gamma_hat);
    CHECK(a.backward.gamma_hat == b.backward.gamma_hat);
  }
  SUBCASE("forward and backward rates agree within errors") {
    const PhaseDistribution nu = PhaseDistribution::uniform();
    LyapunovOptions big;
    big.steps = 20000;
    big.runs = 12;
    const LyapunovPair e = estimate_lyapunov(nu, p, 0.4, big, 21);
    const double allowance = 3.0 * (e.forward.std_error + e.backward.std_error) +
                             20.0 / static_cast<double>(big.steps);
    CHECK(std::abs(e.forward.gamma_hat - e.backward.gamma_hat) < allowance);
    CHECK(e.forward.gamma_hat - 3.0 * e.forward.std_error > 0.0);
  }
  SUBCASE("per-site rate is half the per-step rate") {
    LyapunovEstimate e;
    e.gamma_hat = 0.8;
    CHECK(e.gamma_per_site() == 0.4);
  }
}

TEST_CASE("full-lattice generalized eigenvectors") {
  const BandParameters p = BandParameters::from_t(0.5);
  const DisorderRealization om =
      sample_phases(PhaseDistribution::uniform(), 13, -20, 40);
  const double alpha = 0.6;

  SUBCASE("solves the eigenvalue equation on interior rows") {
    const GeneralizedEigenvector g = build_generalized_eigenvector_full(
        om, alpha, Complex(0.3, -0.4), Complex(1.0, 0.2), -19, 18, p);
    const BandUnitaryWindow u = apply_phases(build_s_window(p, 38, -19), om);
    CHECK(eigen_equation_residual(u, g, 3, 35) < 1e-10);
  }
  SUBCASE("bounded inside the band for constant phases") {
    const DisorderRealization zeros = constant_phases(0.0, -1001, 2002);
    const GeneralizedEigenvector g = build_generalized_eigenvector_full(
        zeros, 0.3, Complex(1.0), Complex(0.5), -1001, 1000, p);
    double biggest = 0.0;
    for (const Complex& c : g.coeffs) biggest = std::max(biggest, std::abs(c));
    CHECK(biggest < 1e3);  // alpha = 0.3 lies inside the halfwidth pi/3 band
  }
  SUBCASE("linear in the seed pair") {
    const Complex lambda(2.0, -1.0);
    const GeneralizedEigenvector g1 = build_generalized_eigenvector_full(
        om, alpha, Complex(1.0), Complex(0.4, 0.1), -15, 14, p);
    const GeneralizedEigenvector g2 = build_generalized_eigenvector_full(
        om, alpha, lambda, lambda * Complex(0.4, 0.1), -15, 14, p);
    for (std::size_t i = 0; i < g1.coeffs.size(); ++i)
      CHECK(std::abs(g2.coeffs[i] - lambda * g1.coeffs[i]) <
            1e-12 * std::abs(lambda * g1.coeffs[i]) + 1e-300);
  }
  SUBCASE("zero seed pair is rejected") {
    CHECK_THROWS_AS(build_generalized_eigenvector_full(om, alpha, Complex(0.0),
                                                       Complex(0.0), -5, 4, p),
                    std::invalid_argument);
  }
}

TEST_CASE("half-lattice generalized eigenvectors") {
  const BandParameters p = BandParameters::from_t(0.5);

  SUBCASE("boundary seed closed form at zero phases") {
    const DisorderRealization zeros = constant_phases(0.0, 0, 10);
    const GeneralizedEigenvector g =
        build_generalized_eigenvector_half(zeros, 0.0, Complex(1.0), 10, p);
    CHECK(std::abs(g.coeffs[1] - Complex((1.0 + p.r) / p.t)) < 1e-14);
    CHECK(std::abs(g.coeffs[2] + Complex(1.0)) < 1e-13);
  }
  SUBCASE("solves the half-lattice eigenvalue equation") {
    const DisorderRealization om =
        sample_phases(PhaseDistribution::uniform(), 19, 0, 40);
    const double alpha = 1.2;
    const GeneralizedEigenvector g =
        build_generalized_eigenvector_half(om, alpha, Complex(1.0), 39, p);
    const BandUnitaryWindow u = apply_phases(build_s_plus(p, 38), om);
    // Pad psi only over covered rows; exclude rows touching the far edge.
    GeneralizedEigenvector padded = g;
    padded.coeffs.resize(38);
    CHECK(eigen_equation_residual(u, padded, 0, 34) < 1e-10);
  }
  SUBCASE("linear in c0") {
    const DisorderRealization om =
        sample_phases(PhaseDistribution::uniform(), 19, 0, 20);
    const Complex lambda(0.0, 2.0);
    const GeneralizedEigenvector g1 =
        build_generalized_eigenvector_half(om, 0.4, Complex(1.0), 19, p);
    const GeneralizedEigenvector g2 =
        build_generalized_eigenvector_half(om, 0.4, lambda, 19, p);
    for (std::size_t i = 0; i < g1.coeffs.size(); ++i)
      CHECK(std::abs(g2.coeffs[i] - lambda * g1.coeffs[i]) <
            1e-12 * std::abs(lambda * g1.coeffs[i]) + 1e-300);
  }
  SUBCASE("zero boundary value is rejected") {
    const DisorderRealization om = constant_phases(0.0, 0, 10);
    CHECK_THROWS_AS(
        build_generalized_eigenvector_half(om, 0.0, Complex(0.0), 10, p),
        std::invalid_argument);
  }
}

TEST_CASE("exponential decay fits") {
  SUBCASE("exact log-linear data") {
    std::vector<double> mags;
    for (std::int64_t k = -50; k <= 50; ++k)
      mags.push_back(std::exp(-0.3 * std::abs(static_cast<double>(k))));
    const DecayFit f = decay_rate_fit(mags, -50, -50, 51);
    CHECK(std::abs(f.rate_per_site - 0.3) < 1e-12);
    CHECK(f.residual < 1e-12);
  }
  SUBCASE("noisy data recovers the rate") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> noise(-0.1, 0.1);
    std::vector<double> mags;
    for (std::int64_t k = -100; k <= 100; ++k)
      mags.push_back(std::exp(-0.3 * std::abs(static_cast<double>(k))) *
                     (1.0 + noise(gen)));
    const DecayFit f = decay_rate_fit(mags, -100, -100, 101);
    CHECK(std::abs(f.rate_per_site - 0.3) < 0.02);
  }
  SUBCASE("too few usable points") {
    std::vector<double> mags(30, 0.0);
    mags[0] = 1.0;
    CHECK_THROWS_AS(decay_rate_fit(mags, 0, 0, 30), std::invalid_argument);
  }
}
