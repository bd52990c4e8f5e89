#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uband/disorder.hpp"

namespace uband {

/// Band parameters (t, r) with r = +sqrt(1 - t^2).
struct BandParameters {
  double t = 0.0;
  double r = 1.0;

  static BandParameters from_t(double t);
};

enum class WindowFlavor { SFull, UFull, SPlus, UPlus, CMV, DDiagonal };
enum class BoundaryMode { ScalarCompletion, Wrap };

std::string flavor_name(WindowFlavor f);

/// Finite dense unitary window of one of the operators, with index-offset
/// metadata: matrix row i corresponds to lattice index offset + i.
struct BandUnitaryWindow {
  Eigen::MatrixXcd m;
  std::int64_t offset = 0;
  WindowFlavor flavor = WindowFlavor::SFull;
  BandParameters params;
  std::optional<DisorderRealization> phases;
  double spectral_shift = 0.0;

  std::int64_t size() const { return m.rows(); }
  std::int64_t row_of(std::int64_t lattice_index) const {
    return lattice_index - offset;
  }
  bool covers(std::int64_t lo, std::int64_t hi) const {  // [lo, hi)
    return lo >= offset && hi <= offset + size();
  }
};

/// max-norm of (M * adjoint(M) - identity).
double unitarity_defect(const Eigen::MatrixXcd& m);

/// |det M|, evaluated through partial-pivoting LU in log space.
double det_modulus(const Eigen::MatrixXcd& m);

// The deterministic operator S(t) factors into two block-diagonal real
// rotations: P carries blocks [[r, t], [-t, r]] on lattice pairs (2k, 2k+1)
// and Q carries [[r, -t], [t, r]] on pairs (2k-1, 2k). The product
// reproduces the five-diagonal period-2 pattern with anchor
// <2k-2|S|2k> = -t^2 and the transfer-matrix recursion on interior rows.
//
// Finite windows complete truncated edge blocks with unimodular scalars:
// +1 for full-lattice windows (the window tends to the identity as t -> 0),
// and -1 at site 0 of the half-lattice operator, which yields the first
// column (-r, t) of S+ exactly.

/// Window of S(t) over lattice indices [offset, offset + size).
BandUnitaryWindow build_s_window(BandParameters p, std::int64_t size,
                                 std::int64_t offset,
                                 BoundaryMode boundary = BoundaryMode::ScalarCompletion);

/// Half-lattice operator S+ over indices [0, size).
BandUnitaryWindow build_s_plus(BandParameters p, std::int64_t size);

/// U = diag(e^{-i(theta_k + alpha)}) * base. omega must cover the window.
BandUnitaryWindow apply_phases(const BandUnitaryWindow& base,
                               const DisorderRealization& omega,
                               double spectral_shift = 0.0);

/// Pure phase diagonal diag(e^{-i theta_k}) (the t -> 0 surrogate).
BandUnitaryWindow build_diagonal(const DisorderRealization& omega);

/// CMV matrix for constant-modulus Verblunski coefficients
/// alpha_k = r e^{i eta_k}, over indices [0, size).
BandUnitaryWindow build_cmv(const VerblunskiPhaseSequence& v, std::int64_t size);

/// Diagonal basis change B|j> = e^{i beta_j}|j> with
///   beta_1 - beta_0 = theta_1 + pi,
///   beta_{2k+1} - beta_{2k-1} = theta_{2k+1},
///   beta_{2k+2} - beta_{2k} = -theta_{2k}.
/// beta_0 is free; changing it rotates B by a global phase and leaves the
/// CMV conjugation defect unchanged.
struct BasisChange {
  std::vector<double> betas;
  double beta0 = 0.0;
};

BasisChange build_basis_change(const std::vector<double>& thetas, double beta0,
                               std::int64_t size);

/// max-norm of B^{-1} C B + U+ over rows and columns away from the far
/// truncation edge, with theta_k = eta_k - eta_{k-1} derived from v.
double cmv_conjugation_check(const VerblunskiPhaseSequence& v, double beta0,
                             std::int64_t size);

/// Residuals of the exact vector identities used in the cyclicity lemma:
/// the expansions of U|-1>, U|0>, U^{-1}|0>, U^{-1}|-1> and the derived
/// expressions for |1> and |-2>. U must be a U-full window with phases,
/// covering [-6, 7) at least.
std::map<std::string, double> cyclicity_identity_check(const BandUnitaryWindow& u);

/// Residual of |1> = (e^{i theta_1}/t) (U+|0> + r e^{-i theta_0} |0>).
double half_lattice_cyclicity_check(const BandUnitaryWindow& u_plus);

/// Dump a window: a `# {json header}` line, then CSV rows (row, col, re, im)
/// of the nonzero entries, 17 significant digits.
void dump_window(const BandUnitaryWindow& w, const std::string& path);

}  // namespace uband
