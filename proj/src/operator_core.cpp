#include "uband/operator_core.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace uband {

using Complex = std::complex<double>;

BandParameters BandParameters::from_t(double t) {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("t outside [0, 1]");
  return BandParameters{t, std::sqrt(1.0 - t * t)};
}

std::string flavor_name(WindowFlavor f) {
  switch (f) {
    case WindowFlavor::SFull: return "S-full";
    case WindowFlavor::UFull: return "U-full";
    case WindowFlavor::SPlus: return "S-plus";
    case WindowFlavor::UPlus: return "U-plus";
    case WindowFlavor::CMV: return "CMV";
    case WindowFlavor::DDiagonal: return "D-diagonal";
  }
  return "?";
}

double unitarity_defect(const Eigen::MatrixXcd& m) {
  const auto n = m.rows();
  return (m * m.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

double det_modulus(const Eigen::MatrixXcd& m) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  double log_mod = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    log_mod += std::log(std::abs(lu.matrixLU()(i, i)));
  return std::exp(log_mod);
}

namespace {

inline int parity_of(std::int64_t l) { return static_cast<int>(((l % 2) + 2) % 2); }

// Block-diagonal real factor with 2x2 blocks on lattice pairs (l, l+1),
// l = parity (mod 2). Edge indices whose partner falls outside the window
// get a unimodular scalar, or are paired across the edge in wrap mode.
Eigen::MatrixXd build_factor(std::int64_t n, std::int64_t offset, int parity,
                             const Eigen::Matrix2d& block, double left_scalar,
                             double right_scalar, bool wrap) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
  bool left_loose = parity_of(offset) != parity;
  bool right_loose = parity_of(offset + n - 1) == parity;
  for (std::int64_t i = left_loose ? 1 : 0; i + 1 < n; i += 2) {
    f(i, i) = block(0, 0);
    f(i, i + 1) = block(0, 1);
    f(i + 1, i) = block(1, 0);
    f(i + 1, i + 1) = block(1, 1);
  }
  if (left_loose != right_loose)
    throw std::logic_error("factor tiling parity mismatch (odd window size?)");
  if (left_loose) {
    if (wrap) {
      f(n - 1, n - 1) = block(0, 0);
      f(n - 1, 0) = block(0, 1);
      f(0, n - 1) = block(1, 0);
      f(0, 0) = block(1, 1);
    } else {
      f(0, 0) = left_scalar;
      f(n - 1, n - 1) = right_scalar;
    }
  }
  return f;
}

Eigen::Matrix2d p_block(BandParameters p) {
  Eigen::Matrix2d b;
  b << p.r, p.t, -p.t, p.r;
  return b;
}

Eigen::Matrix2d q_block(BandParameters p) {
  Eigen::Matrix2d b;
  b << p.r, -p.t, p.t, p.r;
  return b;
}

}  // namespace

BandUnitaryWindow build_s_window(BandParameters p, std::int64_t size,
                                 std::int64_t offset, BoundaryMode boundary) {
  if (size < 4 || size % 2 != 0)
    throw std::invalid_argument("window size must be even and >= 4");
  const bool wrap = boundary == BoundaryMode::Wrap;
  Eigen::MatrixXd pf = build_factor(size, offset, 0, p_block(p), 1.0, 1.0, wrap);
  Eigen::MatrixXd qf = build_factor(size, offset, 1, q_block(p), 1.0, 1.0, wrap);
  BandUnitaryWindow w;
  w.m = (pf * qf).cast<Complex>();
  w.offset = offset;
  w.flavor = WindowFlavor::SFull;
  w.params = p;
  return w;
}

BandUnitaryWindow build_s_plus(BandParameters p, std::int64_t size) {
  if (size < 4 || size % 2 != 0)
    throw std::invalid_argument("window size must be even and >= 4");
  Eigen::MatrixXd pf = build_factor(size, 0, 0, p_block(p), 1.0, 1.0, false);
  Eigen::MatrixXd qf = build_factor(size, 0, 1, q_block(p), -1.0, 1.0, false);
  BandUnitaryWindow w;
  w.m = (pf * qf).cast<Complex>();
  w.offset = 0;
  w.flavor = WindowFlavor::SPlus;
  w.params = p;
  return w;
}

BandUnitaryWindow apply_phases(const BandUnitaryWindow& base,
                               const DisorderRealization& omega,
                               double spectral_shift) {
  if (!omega.covers(base.offset, base.offset + base.size()))
    throw std::invalid_argument("realization does not cover the window");
  BandUnitaryWindow w = base;
  for (std::int64_t i = 0; i < base.size(); ++i) {
    const double phi = omega.phase(base.offset + i) + spectral_shift;
    w.m.row(i) *= std::exp(Complex(0.0, -phi));
  }
  w.phases = omega;
  w.spectral_shift = spectral_shift;
  switch (base.flavor) {
    case WindowFlavor::SFull: w.flavor = WindowFlavor::UFull; break;
    case WindowFlavor::SPlus: w.flavor = WindowFlavor::UPlus; break;
    default: break;
  }
  return w;
}

BandUnitaryWindow build_diagonal(const DisorderRealization& omega) {
  BandUnitaryWindow w;
  const std::int64_t n = omega.size();
  w.m = Eigen::MatrixXcd::Zero(n, n);
  for (std::int64_t i = 0; i < n; ++i)
    w.m(i, i) = std::exp(Complex(0.0, -omega.phase(omega.first + i)));
  w.offset = omega.first;
  w.flavor = WindowFlavor::DDiagonal;
  w.params = BandParameters::from_t(0.0);
  w.phases = omega;
  return w;
}

BandUnitaryWindow build_cmv(const VerblunskiPhaseSequence& v, std::int64_t size) {
  if (size < 4 || size % 2 != 0)
    throw std::invalid_argument("window size must be even and >= 4");
  if (static_cast<std::int64_t>(v.etas.size()) < size - 1)
    throw std::invalid_argument("insufficient Verblunski phase data");
  const double r = v.modulus;
  const double t = std::sqrt(1.0 - r * r);
  auto alpha = [&](std::int64_t k) {
    return r * std::exp(Complex(0.0, v.etas[static_cast<std::size_t>(k)]));
  };
  auto theta_block = [&](std::int64_t k) {
    Eigen::Matrix2cd b;
    b << std::conj(alpha(k)), t, t, -alpha(k);
    return b;
  };
  Eigen::MatrixXcd lf = Eigen::MatrixXcd::Zero(size, size);
  for (std::int64_t i = 0; i + 1 < size; i += 2)
    lf.block<2, 2>(i, i) = theta_block(i);
  Eigen::MatrixXcd mf = Eigen::MatrixXcd::Zero(size, size);
  mf(0, 0) = 1.0;
  mf(size - 1, size - 1) = 1.0;  // far-edge scalar completion
  for (std::int64_t i = 1; i + 1 < size; i += 2)
    mf.block<2, 2>(i, i) = theta_block(i);
  BandUnitaryWindow w;
  w.m = lf * mf;
  w.offset = 0;
  w.flavor = WindowFlavor::CMV;
  w.params = BandParameters{t, r};
  return w;
}

BasisChange build_basis_change(const std::vector<double>& thetas, double beta0,
                               std::int64_t size) {
  if (static_cast<std::int64_t>(thetas.size()) < size)
    throw std::invalid_argument("theta sequence shorter than requested size");
  BasisChange b;
  b.beta0 = beta0;
  b.betas.resize(static_cast<std::size_t>(size));
  b.betas[0] = reduce_angle(beta0);
  if (size > 1) b.betas[1] = reduce_angle(beta0 + thetas[1] + std::numbers::pi);
  for (std::int64_t j = 2; j < size; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    if (j % 2 == 1)
      b.betas[ju] = reduce_angle(b.betas[ju - 2] + thetas[ju]);
    else
      b.betas[ju] = reduce_angle(b.betas[ju - 2] - thetas[ju - 2]);
  }
  return b;
}

double cmv_conjugation_check(const VerblunskiPhaseSequence& v, double beta0,
                             std::int64_t size) {
  if (static_cast<std::int64_t>(v.etas.size()) < size)
    throw std::invalid_argument("insufficient Verblunski phase data");
  const std::vector<double> thetas = verblunski_to_thetas(v);
  DisorderRealization om;
  om.seed = 0;
  om.first = 0;
  om.phases.assign(thetas.begin(), thetas.begin() + size);

  const double r = v.modulus;
  const BandParameters p{std::sqrt(1.0 - r * r), r};
  const BandUnitaryWindow u_plus = apply_phases(build_s_plus(p, size), om);
  const BandUnitaryWindow c = build_cmv(v, size);
  const BasisChange b = build_basis_change(thetas, beta0, size);

  // B^{-1} C B + U+, away from the far truncation edge.
  const std::int64_t lim = size - 4;
  double defect = 0.0;
  for (std::int64_t i = 0; i < lim; ++i)
    for (std::int64_t j = 0; j < lim; ++j) {
      const Complex phase = std::exp(
          Complex(0.0, b.betas[static_cast<std::size_t>(j)] -
                           b.betas[static_cast<std::size_t>(i)]));
      defect = std::max(defect, std::abs(phase * c.m(i, j) + u_plus.m(i, j)));
    }
  return defect;
}

std::map<std::string, double> cyclicity_identity_check(const BandUnitaryWindow& u) {
  if (u.flavor != WindowFlavor::UFull || !u.phases)
    throw std::invalid_argument("cyclicity check needs a U-full window with phases");
  if (!u.covers(-6, 7))
    throw std::invalid_argument("window too small: must cover lattice [-6, 6]");
  const double t = u.params.t;
  const double r = u.params.r;
  const std::int64_t n = u.size();
  auto theta = [&](std::int64_t k) { return u.phases->phase(k) + u.spectral_shift; };
  auto ph = [&](std::int64_t k, double sign) {
    return std::exp(Complex(0.0, sign * theta(k)));
  };
  auto e = [&](std::int64_t l) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    v(u.row_of(l)) = 1.0;
    return v;
  };
  auto ucol = [&](std::int64_t l) -> Eigen::VectorXcd { return u.m.col(u.row_of(l)); };
  auto uinv = [&](std::int64_t l) -> Eigen::VectorXcd {
    return u.m.row(u.row_of(l)).adjoint();
  };

  std::map<std::string, double> defects;
  defects["u_minus1"] =
      (ucol(-1) - (ph(-2, -1) * r * t * e(-2) + ph(-1, -1) * r * r * e(-1) +
                   ph(0, -1) * r * t * e(0) - ph(1, -1) * t * t * e(1)))
          .cwiseAbs()
          .maxCoeff();
  defects["u_0"] =
      (ucol(0) - (-ph(-2, -1) * t * t * e(-2) - ph(-1, -1) * r * t * e(-1) +
                  ph(0, -1) * r * r * e(0) - ph(1, -1) * r * t * e(1)))
          .cwiseAbs()
          .maxCoeff();
  defects["uinv_0"] =
      (uinv(0) - ph(0, 1) * (r * t * e(-1) + r * r * e(0) + r * t * e(1) -
                             t * t * e(2)))
          .cwiseAbs()
          .maxCoeff();
  defects["uinv_minus1"] =
      (uinv(-1) - ph(-1, 1) * (-t * t * e(-3) - r * t * e(-2) + r * r * e(-1) -
                               r * t * e(0)))
          .cwiseAbs()
          .maxCoeff();
  defects["up"] =
      (e(1) - (ph(1, 1) / t) *
                  (ph(0, -1) * r * e(0) - (t * ucol(-1) + r * ucol(0))))
          .cwiseAbs()
          .maxCoeff();
  defects["upp"] =
      (e(-2) - (ph(-2, 1) / t) *
                   (r * ucol(-1) - t * ucol(0) - ph(-1, -1) * r * e(-1)))
          .cwiseAbs()
          .maxCoeff();
  return defects;
}

double half_lattice_cyclicity_check(const BandUnitaryWindow& u_plus) {
  if (u_plus.flavor != WindowFlavor::UPlus || !u_plus.phases)
    throw std::invalid_argument("needs a U-plus window with phases");
  if (u_plus.size() < 4) throw std::invalid_argument("window too small");
  const double t = u_plus.params.t;
  const double r = u_plus.params.r;
  const std::int64_t n = u_plus.size();
  auto theta = [&](std::int64_t k) {
    return u_plus.phases->phase(k) + u_plus.spectral_shift;
  };
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(n);
  e0(0) = 1.0;
  Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(n);
  e1(1) = 1.0;
  Eigen::VectorXcd rhs =
      (std::exp(Complex(0.0, theta(1))) / t) *
      (u_plus.m.col(0) + r * std::exp(Complex(0.0, -theta(0))) * e0);
  return (e1 - rhs).cwiseAbs().maxCoeff();
}

void dump_window(const BandUnitaryWindow& w, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  nlohmann::json header = {
      {"flavor", flavor_name(w.flavor)},
      {"size", w.size()},
      {"offset", w.offset},
      {"t", w.params.t},
      {"seed", w.phases ? w.phases->seed : 0},
  };
  out << "# " << header.dump() << "\n";
  out << "row,col,re,im\n";
  char buf[128];
  for (std::int64_t i = 0; i < w.size(); ++i)
    for (std::int64_t j = 0; j < w.size(); ++j) {
      const Complex z = w.m(i, j);
      if (z == Complex(0.0, 0.0)) continue;
      std::snprintf(buf, sizeof(buf), "%lld,%lld,%.17g,%.17g\n",
                    static_cast<long long>(i), static_cast<long long>(j),
                    z.real(), z.imag());
      out << buf;
    }
}

}  // namespace uband
