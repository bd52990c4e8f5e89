#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "uband/arcs.hpp"
#include "uband/disorder.hpp"
#include "uband/operator_core.hpp"
#include "uband/transfer.hpp"

namespace uband {

/// Almost-sure spectrum Sigma = exp(i supp nu) * Sigma(t): the Minkowski
/// rotation of the deterministic arc by the support of nu.
ArcSet almost_sure_spectrum(const PhaseDistribution& nu, double t);

/// Full eigendecomposition of a unitary window. Eigenphases sorted in
/// [0, 2*pi); eigenvector columns in matching order. The residual bounds
/// max_j ||U v_j - e^{i lambda_j} v_j||.
struct UnitaryEigenDecomposition {
  std::vector<double> eigenphases;
  Eigen::MatrixXcd eigenvectors;
  double residual = 0.0;
  std::int64_t offset = 0;

  std::int64_t size() const { return eigenvectors.rows(); }
};

/// Schur-based decomposition (LAPACK zgees). Refuses input whose unitarity
/// defect, probed by random matvecs, exceeds 1e-10.
UnitaryEigenDecomposition eig_unitary(const BandUnitaryWindow& u);

/// Spectral measure mu^site: atoms (lambda_j, |<site|v_j>|^2).
struct SpectralMeasure {
  std::vector<double> phases;
  std::vector<double> weights;
  std::int64_t site = 0;

  double total_mass() const;
  std::complex<double> moment(int n) const;  // sum_j w_j e^{i n lambda_j}
};

SpectralMeasure spectral_measure(const UnitaryEigenDecomposition& dec,
                                 std::int64_t site);

/// Average the site-0 spectral measure over a uniform grid of theta_0
/// values (all other phases held fixed); returns the averaged moments
/// m_n for 0 <= n <= max_moment.
std::vector<std::complex<double>> spectral_averaging_experiment(
    const DisorderRealization& other_phases, std::int64_t grid,
    std::int64_t window, BandParameters p, int max_moment = 10);

/// Numerical rank of the Krylov matrix with columns U^n |site> for n in a
/// symmetric range of span_order powers per site. Rank counts singular
/// values above 1e-8 relative to the largest.
struct KrylovResult {
  std::int64_t rank = 0;
  std::vector<double> singular_values;
};

KrylovResult krylov_cyclicity(const BandUnitaryWindow& u,
                              const std::vector<std::int64_t>& sites,
                              std::int64_t span_order);

/// Localization evidence over several disorder realizations.
struct EigenvectorStats {
  double eigenphase = 0.0;
  double decay_rate = 0.0;  // per lattice site; NaN if the fit failed
  double participation_ratio = 0.0;
  double edge_mass = 0.0;
  bool insulated = false;
};

struct LocalizationOptions {
  std::int64_t window = 500;
  std::int64_t realizations = 10;
  double eps = 0.05;            // fattening of Sigma for containment
  std::int64_t edge_sites = 10; // sites per edge for the insulation filter
  double edge_mass_threshold = 1e-6;
  bool with_lyapunov = true;
  LyapunovOptions lyap;
};

struct LocalizationReport {
  double t = 0.0;
  std::string nu_spec;
  std::uint64_t seed = 0;
  LocalizationOptions opts;
  std::vector<std::vector<EigenvectorStats>> realizations;

  double gamma_hat = 0.0;  // per transfer step, alpha = 0
  double gamma_std_error = 0.0;
  double median_decay_insulated = 0.0;
  double median_decay_all = 0.0;
  double median_participation_ratio = 0.0;
  double containment_fraction = 0.0;  // insulated eigenphases in fattened Sigma
  double q99_distance = 0.0;  // 99th percentile distance of insulated
                              // eigenphases to Sigma
  std::int64_t insulated_count = 0;

  std::string to_json() const;
};

LocalizationReport localization_report(const PhaseDistribution& nu, double t,
                                       const LocalizationOptions& opts,
                                       std::uint64_t seed);

}  // namespace uband
