#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "uband/disorder.hpp"
#include "uband/operator_core.hpp"

namespace uband {

/// 2x2 transfer matrix T(theta, eta) propagating consecutive coefficient
/// pairs of a generalized eigenvector across two lattice sites. The phases
/// are understood to already include the spectral shift alpha.
/// det T = e^{i(theta - eta)}.
struct TransferMatrix {
  Eigen::Matrix2cd m;
  double theta = 0.0;
  double eta = 0.0;
};

TransferMatrix transfer_matrix(double theta, double eta, BandParameters p);

enum class Direction { Forward, Backward };

/// Renormalized ordered product of transfer matrices. The unrenormalized
/// product equals e^{log_norm_sum} * product by construction.
struct CocycleProduct {
  Eigen::Matrix2cd product = Eigen::Matrix2cd::Identity();
  double log_norm_sum = 0.0;
  std::int64_t steps = 0;

  /// ln |det| of the unrenormalized product (0 for a unimodular cocycle).
  double log_abs_det_unrenormalized() const;
};

/// Phi(k, omega): product of T(theta_{2j}+alpha, theta_{2j+1}+alpha) for
/// j = 0..k-1 (forward), or of inverses over j = -1..-k (backward),
/// renormalized by the Frobenius norm at every step.
CocycleProduct cocycle(const DisorderRealization& omega, double alpha,
                       std::int64_t k, Direction dir, BandParameters p);

/// Monte-Carlo Lyapunov exponent estimate, per transfer step (one step
/// spans 2 lattice sites).
struct LyapunovEstimate {
  double alpha = 0.0;
  double gamma_hat = 0.0;
  double std_error = 0.0;
  std::int64_t steps_per_run = 0;
  std::int64_t runs = 0;
  Direction direction = Direction::Forward;

  double gamma_per_site() const { return 0.5 * gamma_hat; }
};

struct LyapunovPair {
  LyapunovEstimate forward;
  LyapunovEstimate backward;
};

struct LyapunovOptions {
  std::int64_t steps = 100000;
  std::int64_t runs = 16;
  std::int64_t burn_in = 100;  // steps discarded from the log-average
};

/// Independent-realization estimate: run r uses a child seed derived from
/// (seed, r) and averages (log_norm_sum + ln||product||) / counted steps.
/// Runs execute in parallel (OpenMP); the reduction is ordered by run
/// index, so the result is schedule-independent and identical to the
/// serial reference.
LyapunovPair estimate_lyapunov(const PhaseDistribution& dist, BandParameters p,
                               double alpha, const LyapunovOptions& opts,
                               std::uint64_t seed);

/// Serial reference implementation, kept for testing; bitwise-identical
/// results to estimate_lyapunov.
LyapunovPair estimate_lyapunov_serial(const PhaseDistribution& dist,
                                      BandParameters p, double alpha,
                                      const LyapunovOptions& opts,
                                      std::uint64_t seed);

/// Generalized eigenvector coefficients c_k over the contiguous lattice
/// range [first, first + coeffs.size()).
struct GeneralizedEigenvector {
  std::int64_t first = 0;
  std::vector<std::complex<double>> coeffs;
  double alpha = 0.0;

  std::complex<double> at(std::int64_t k) const {
    return coeffs[static_cast<std::size_t>(k - first)];
  }
};

/// Full-lattice solution of U psi = e^{i alpha} psi from the seed pair
/// (c_{-1}, c_0), extended by the transfer recursion over [lo, hi].
GeneralizedEigenvector build_generalized_eigenvector_full(
    const DisorderRealization& omega, double alpha,
    std::complex<double> c_minus1, std::complex<double> c_0, std::int64_t lo,
    std::int64_t hi, BandParameters p);

/// Half-lattice solution over [0, count) from the free boundary value c_0:
/// (c_1, c_2) come from the closed-form boundary seed, then the recursion.
GeneralizedEigenvector build_generalized_eigenvector_half(
    const DisorderRealization& omega, double alpha, std::complex<double> c_0,
    std::int64_t count, BandParameters p);

/// Max over interior rows [row_lo, row_hi) of |(U psi - e^{i alpha} psi)_row|
/// relative to the local coefficient scale.
double eigen_equation_residual(const BandUnitaryWindow& u,
                               const GeneralizedEigenvector& g,
                               std::int64_t row_lo, std::int64_t row_hi);

/// Exponential-decay fit: least-squares slope of ln|c_k| against the
/// distance |k - k_peak| over the lattice fit window [fit_lo, fit_hi),
/// skipping magnitudes below the 1e-300 underflow floor.
struct DecayFit {
  double rate_per_site = 0.0;
  double residual = 0.0;  // RMS of the fit residuals in log space
  std::int64_t points_used = 0;
};

DecayFit decay_rate_fit(const std::vector<double>& magnitudes,
                        std::int64_t first_index, std::int64_t fit_lo,
                        std::int64_t fit_hi);

DecayFit decay_rate_fit(const GeneralizedEigenvector& g, std::int64_t fit_lo,
                        std::int64_t fit_hi);

}  // namespace uband
