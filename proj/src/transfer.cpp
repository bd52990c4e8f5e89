#include "uband/transfer.hpp"

#include <cmath>
#include <stdexcept>

#include "uband/rng.hpp"

namespace uband {

using Complex = std::complex<double>;

TransferMatrix transfer_matrix(double theta, double eta, BandParameters p) {
  if (!(p.t > 0.0 && p.t < 1.0))
    throw std::domain_error("transfer matrix requires t in (0, 1)");
  const double t = p.t;
  const double r = p.r;
  const Complex eit = std::exp(Complex(0.0, theta));
  const Complex emie = std::exp(Complex(0.0, -eta));
  TransferMatrix out;
  out.theta = theta;
  out.eta = eta;
  out.m(0, 0) = -emie;
  out.m(0, 1) = (r / t) * (eit * emie - emie);
  out.m(1, 0) = (r / t) * (1.0 - emie);
  out.m(1, 1) = -eit / (t * t) + (r * r) / (t * t) * (eit * emie + 1.0 - emie);
  return out;
}

double CocycleProduct::log_abs_det_unrenormalized() const {
  return std::log(std::abs(product.determinant())) + 2.0 * log_norm_sum;
}

namespace {

inline void renorm_step(Eigen::Matrix2cd& prod, double& log_norm_sum) {
  const double n = prod.norm();  // Frobenius
  prod /= n;
  log_norm_sum += std::log(n);
}

// One streamed cocycle accumulation; phases are drawn on the fly as a pure
// function of (dist, seed, index).
template <class PhaseAt>
double lyapunov_single_run(PhaseAt&& phase_at, BandParameters p, double alpha,
                           std::int64_t steps, std::int64_t burn_in,
                           Direction dir) {
  Eigen::Matrix2cd prod = Eigen::Matrix2cd::Identity();
  double log_norm_sum = 0.0;
  for (std::int64_t j = 0; j < steps; ++j) {
    Eigen::Matrix2cd step;
    if (dir == Direction::Forward) {
      step = transfer_matrix(phase_at(2 * j) + alpha, phase_at(2 * j + 1) + alpha, p).m;
    } else {
      const std::int64_t i = -(j + 1);
      step = transfer_matrix(phase_at(2 * i) + alpha, phase_at(2 * i + 1) + alpha, p)
                 .m.inverse();
    }
    prod = step * prod;
    renorm_step(prod, log_norm_sum);
    if (j + 1 == burn_in) {
      // discard the transient from the log-average
      log_norm_sum = 0.0;
    }
  }
  const std::int64_t counted = steps - std::min(burn_in, steps);
  if (counted <= 0) throw std::invalid_argument("burn-in consumed every step");
  return (log_norm_sum + std::log(prod.norm())) / static_cast<double>(counted);
}

LyapunovEstimate reduce_runs(const std::vector<double>& gammas, double alpha,
                             const LyapunovOptions& opts, Direction dir) {
  const auto runs = static_cast<double>(gammas.size());
  double mean = 0.0;
  for (double g : gammas) mean += g;
  mean /= runs;
  double var = 0.0;
  for (double g : gammas) var += (g - mean) * (g - mean);
  var = gammas.size() > 1 ? var / (runs - 1.0) : 0.0;
  LyapunovEstimate e;
  e.alpha = alpha;
  e.gamma_hat = mean;
  e.std_error = std::sqrt(var / runs);
  e.steps_per_run = opts.steps;
  e.runs = static_cast<std::int64_t>(gammas.size());
  e.direction = dir;
  return e;
}

LyapunovPair estimate_impl(const PhaseDistribution& dist, BandParameters p,
                           double alpha, const LyapunovOptions& opts,
                           std::uint64_t seed, bool parallel) {
  if (opts.runs < 1) throw std::invalid_argument("runs must be >= 1");
  std::vector<double> fwd(static_cast<std::size_t>(opts.runs));
  std::vector<double> bwd(static_cast<std::size_t>(opts.runs));
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t run = 0; run < opts.runs; ++run) {
    const std::uint64_t run_seed = derive_seed(seed, static_cast<std::uint64_t>(run));
    auto phase_at = [&](std::int64_t k) { return dist.sample(run_seed, k); };
    fwd[static_cast<std::size_t>(run)] = lyapunov_single_run(
        phase_at, p, alpha, opts.steps, opts.burn_in, Direction::Forward);
    bwd[static_cast<std::size_t>(run)] = lyapunov_single_run(
        phase_at, p, alpha, opts.steps, opts.burn_in, Direction::Backward);
  }
  return {reduce_runs(fwd, alpha, opts, Direction::Forward),
          reduce_runs(bwd, alpha, opts, Direction::Backward)};
}

}  // namespace

CocycleProduct cocycle(const DisorderRealization& omega, double alpha,
                       std::int64_t k, Direction dir, BandParameters p) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  if (dir == Direction::Forward) {
    if (k > 0 && !omega.covers(0, 2 * k))
      throw std::out_of_range("realization does not cover forward indices");
  } else {
    if (k > 0 && !omega.covers(-2 * k, 0))
      throw std::out_of_range("realization does not cover backward indices");
  }
  CocycleProduct out;
  for (std::int64_t j = 0; j < k; ++j) {
    Eigen::Matrix2cd step;
    if (dir == Direction::Forward) {
      step = transfer_matrix(omega.phase(2 * j) + alpha,
                             omega.phase(2 * j + 1) + alpha, p)
                 .m;
    } else {
      const std::int64_t i = -(j + 1);
      step = transfer_matrix(omega.phase(2 * i) + alpha,
                             omega.phase(2 * i + 1) + alpha, p)
                 .m.inverse();
    }
    out.product = step * out.product;
    renorm_step(out.product, out.log_norm_sum);
    ++out.steps;
  }
  return out;
}

LyapunovPair estimate_lyapunov(const PhaseDistribution& dist, BandParameters p,
                               double alpha, const LyapunovOptions& opts,
                               std::uint64_t seed) {
  return estimate_impl(dist, p, alpha, opts, seed, true);
}

LyapunovPair estimate_lyapunov_serial(const PhaseDistribution& dist,
                                      BandParameters p, double alpha,
                                      const LyapunovOptions& opts,
                                      std::uint64_t seed) {
  return estimate_impl(dist, p, alpha, opts, seed, false);
}

GeneralizedEigenvector build_generalized_eigenvector_full(
    const DisorderRealization& omega, double alpha, Complex c_minus1,
    Complex c_0, std::int64_t lo, std::int64_t hi, BandParameters p) {
  if (c_minus1 == Complex(0.0) && c_0 == Complex(0.0))
    throw std::invalid_argument("seed pair must be nonzero");
  if (lo > -1 || hi < 0) throw std::invalid_argument("range must contain {-1, 0}");
  GeneralizedEigenvector g;
  g.first = lo;
  g.alpha = alpha;
  g.coeffs.assign(static_cast<std::size_t>(hi - lo + 1), Complex(0.0));
  auto set = [&](std::int64_t k, Complex v) {
    if (k >= lo && k <= hi) g.coeffs[static_cast<std::size_t>(k - lo)] = v;
  };
  set(-1, c_minus1);
  set(0, c_0);
  Eigen::Vector2cd pair(c_minus1, c_0);
  for (std::int64_t k = 0; 2 * (k + 1) <= hi + 1; ++k) {
    pair = transfer_matrix(omega.phase(2 * k) + alpha,
                           omega.phase(2 * k + 1) + alpha, p)
               .m *
           pair;
    set(2 * k + 1, pair(0));
    set(2 * k + 2, pair(1));
  }
  pair = Eigen::Vector2cd(c_minus1, c_0);
  for (std::int64_t k = 1; -2 * k - 1 >= lo; ++k) {
    pair = transfer_matrix(omega.phase(-2 * k) + alpha,
                           omega.phase(-2 * k + 1) + alpha, p)
               .m.inverse() *
           pair;
    set(-2 * k - 1, pair(0));
    set(-2 * k, pair(1));
  }
  return g;
}

GeneralizedEigenvector build_generalized_eigenvector_half(
    const DisorderRealization& omega, double alpha, Complex c_0,
    std::int64_t count, BandParameters p) {
  if (c_0 == Complex(0.0)) throw std::invalid_argument("c_0 must be nonzero");
  if (count < 3) throw std::invalid_argument("count must be >= 3");
  const double t = p.t;
  const double r = p.r;
  const double th0 = omega.phase(0);
  const double th1 = omega.phase(1);
  const Complex a = std::exp(Complex(0.0, -(th1 + alpha))) +
                    r * std::exp(Complex(0.0, -(th1 - th0)));
  const Complex c1 = c_0 * a / t;
  const Complex c2 =
      c_0 * (a * r / (t * t) -
             (r + std::exp(Complex(0.0, alpha + th0))) / (t * t));
  GeneralizedEigenvector g;
  g.first = 0;
  g.alpha = alpha;
  g.coeffs.assign(static_cast<std::size_t>(count), Complex(0.0));
  g.coeffs[0] = c_0;
  g.coeffs[1] = c1;
  g.coeffs[2] = c2;
  Eigen::Vector2cd pair(c1, c2);
  for (std::int64_t k = 1; 2 * (k + 1) <= count - 1; ++k) {
    pair = transfer_matrix(omega.phase(2 * k) + alpha,
                           omega.phase(2 * k + 1) + alpha, p)
               .m *
           pair;
    g.coeffs[static_cast<std::size_t>(2 * k + 1)] = pair(0);
    g.coeffs[static_cast<std::size_t>(2 * k + 2)] = pair(1);
  }
  return g;
}

double eigen_equation_residual(const BandUnitaryWindow& u,
                               const GeneralizedEigenvector& g,
                               std::int64_t row_lo, std::int64_t row_hi) {
  const std::int64_t n = u.size();
  Eigen::VectorXcd psi(n);
  for (std::int64_t i = 0; i < n; ++i) psi(i) = g.at(u.offset + i);
  const Eigen::VectorXcd res =
      u.m * psi - std::exp(Complex(0.0, g.alpha)) * psi;
  double worst = 0.0;
  for (std::int64_t i = row_lo; i < row_hi; ++i) {
    double local = 0.0;
    for (std::int64_t j = std::max<std::int64_t>(0, i - 2);
         j <= std::min(n - 1, i + 2); ++j)
      local = std::max(local, std::abs(psi(j)));
    if (local == 0.0) continue;
    worst = std::max(worst, std::abs(res(i)) / local);
  }
  return worst;
}

DecayFit decay_rate_fit(const std::vector<double>& magnitudes,
                        std::int64_t first_index, std::int64_t fit_lo,
                        std::int64_t fit_hi) {
  constexpr double floor = 1e-300;
  const std::int64_t n = static_cast<std::int64_t>(magnitudes.size());
  fit_lo = std::max(fit_lo, first_index);
  fit_hi = std::min(fit_hi, first_index + n);
  std::int64_t peak = fit_lo;
  double peak_mag = -1.0;
  for (std::int64_t k = fit_lo; k < fit_hi; ++k) {
    const double m = magnitudes[static_cast<std::size_t>(k - first_index)];
    if (m > peak_mag) {
      peak_mag = m;
      peak = k;
    }
  }
  std::vector<double> xs, ys;
  for (std::int64_t k = fit_lo; k < fit_hi; ++k) {
    const double m = magnitudes[static_cast<std::size_t>(k - first_index)];
    if (m < floor) continue;
    xs.push_back(static_cast<double>(std::llabs(k - peak)));
    ys.push_back(std::log(m));
  }
  if (xs.size() < 20)
    throw std::invalid_argument("too few usable points for a decay fit");
  const double np = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = np * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("degenerate abscissas in decay fit");
  const double slope = (np * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / np;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (intercept + slope * xs[i]);
    rss += e * e;
  }
  DecayFit f;
  f.rate_per_site = -slope;
  f.residual = std::sqrt(rss / np);
  f.points_used = static_cast<std::int64_t>(xs.size());
  return f;
}

DecayFit decay_rate_fit(const GeneralizedEigenvector& g, std::int64_t fit_lo,
                        std::int64_t fit_hi) {
  std::vector<double> mags;
  mags.reserve(g.coeffs.size());
  for (const Complex& c : g.coeffs) mags.push_back(std::abs(c));
  return decay_rate_fit(mags, g.first, fit_lo, fit_hi);
}

}  // namespace uband
