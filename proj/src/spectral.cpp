#include "uband/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/SVD>
#include <lapacke.h>
#include <nlohmann/json.hpp>

#include "uband/angles.hpp"
#include "uband/rng.hpp"

namespace uband {

using Complex = std::complex<double>;

ArcSet almost_sure_spectrum(const PhaseDistribution& nu, double t) {
  // Multiplication by e^{-i theta} rotates the circle; the spectrum is the
  // union over supp nu of the rotated deterministic arc, i.e. a Minkowski
  // sum. Rotation by -theta and by +theta sweep the same union because the
  // support set enters through every point of each of its arcs.
  ArcSet sup = nu.support();
  std::vector<Arc> negated;
  if (sup.is_full()) return ArcSet::full_circle();
  for (const Arc& a : sup.arcs()) negated.push_back({-a.center, a.halfwidth});
  return ArcSet(negated).minkowski_sum(spectrum_of_s(t));
}

UnitaryEigenDecomposition eig_unitary(const BandUnitaryWindow& u) {
  const auto n = static_cast<lapack_int>(u.size());
  if (n < 1) throw std::invalid_argument("empty window");

  // Cheap unitarity probe: random matvec tests of M* M x = x, O(n^2) total.
  double probe_defect = 0.0;
  for (int probe = 0; probe < 8; ++probe) {
    Eigen::VectorXcd x(n);
    for (lapack_int i = 0; i < n; ++i)
      x(i) = Complex(2.0 * uniform01(0x5eedu, probe, i) - 1.0,
                     2.0 * uniform01(0x5eedu, probe + 8, i) - 1.0);
    const Eigen::VectorXcd y = u.m.adjoint() * (u.m * x) - x;
    probe_defect = std::max(
        probe_defect, y.cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff());
  }
  if (probe_defect > 1e-10)
    throw std::invalid_argument("matrix is not unitary (probe defect " +
                                std::to_string(probe_defect) + ")");

  Eigen::MatrixXcd a = u.m;  // overwritten with the Schur form T
  Eigen::MatrixXcd vs(n, n);
  Eigen::VectorXcd w(n);
  lapack_int sdim = 0;
  const lapack_int info = LAPACKE_zgees(
      LAPACK_COL_MAJOR, 'V', 'N', nullptr, n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n, &sdim,
      reinterpret_cast<lapack_complex_double*>(w.data()),
      reinterpret_cast<lapack_complex_double*>(vs.data()), n);
  if (info != 0)
    throw std::runtime_error("Schur decomposition failed, info = " +
                             std::to_string(info));

  // For unitary input the Schur form is diagonal up to roundoff, so the
  // Schur basis is an orthonormal eigenbasis; the leftover off-diagonal
  // mass bounds the eigenpair residual.
  double residual = 0.0;
  for (lapack_int j = 0; j < n; ++j) {
    const double off = j > 0 ? a.col(j).head(j).norm() : 0.0;
    residual = std::max(residual, off + std::abs(std::abs(w(j)) - 1.0));
  }

  std::vector<lapack_int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phases(static_cast<std::size_t>(n));
  for (lapack_int j = 0; j < n; ++j)
    phases[static_cast<std::size_t>(j)] = reduce_angle(std::arg(w(j)));
  std::sort(order.begin(), order.end(), [&](lapack_int i, lapack_int j) {
    return phases[static_cast<std::size_t>(i)] < phases[static_cast<std::size_t>(j)];
  });

  UnitaryEigenDecomposition dec;
  dec.offset = u.offset;
  dec.residual = residual;
  dec.eigenphases.resize(static_cast<std::size_t>(n));
  dec.eigenvectors.resize(n, n);
  for (lapack_int j = 0; j < n; ++j) {
    dec.eigenphases[static_cast<std::size_t>(j)] =
        phases[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
    dec.eigenvectors.col(j) = vs.col(order[static_cast<std::size_t>(j)]);
  }
  return dec;
}

double SpectralMeasure::total_mass() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

Complex SpectralMeasure::moment(int n) const {
  Complex m = 0.0;
  for (std::size_t j = 0; j < phases.size(); ++j)
    m += weights[j] * std::exp(Complex(0.0, n * phases[j]));
  return m;
}

SpectralMeasure spectral_measure(const UnitaryEigenDecomposition& dec,
                                 std::int64_t site) {
  const std::int64_t row = site - dec.offset;
  if (row < 0 || row >= dec.size())
    throw std::out_of_range("site outside the window");
  SpectralMeasure mu;
  mu.site = site;
  mu.phases = dec.eigenphases;
  mu.weights.resize(mu.phases.size());
  for (std::int64_t j = 0; j < dec.size(); ++j)
    mu.weights[static_cast<std::size_t>(j)] = std::norm(dec.eigenvectors(row, j));
  return mu;
}

std::vector<std::complex<double>> spectral_averaging_experiment(
    const DisorderRealization& other_phases, std::int64_t grid,
    std::int64_t window, BandParameters p, int max_moment) {
  if (grid < 1) throw std::invalid_argument("grid must be >= 1");
  const std::int64_t offset = -window / 2;
  if (!other_phases.covers(offset, offset + window))
    throw std::invalid_argument("realization does not cover the window");

  const BandUnitaryWindow s = build_s_window(p, window, offset);
  std::vector<std::vector<Complex>> per_grid(static_cast<std::size_t>(grid));

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t g = 0; g < grid; ++g) {
    DisorderRealization omega = other_phases;
    omega.phases[static_cast<std::size_t>(-omega.first)] =
        two_pi * static_cast<double>(g) / static_cast<double>(grid);
    const SpectralMeasure mu = spectral_measure(
        eig_unitary(apply_phases(s, omega)), 0);
    std::vector<Complex> moments(static_cast<std::size_t>(max_moment + 1));
    for (int n = 0; n <= max_moment; ++n)
      moments[static_cast<std::size_t>(n)] = mu.moment(n);
    per_grid[static_cast<std::size_t>(g)] = std::move(moments);
  }

  // Ordered accumulation keeps the result independent of the schedule.
  std::vector<Complex> avg(static_cast<std::size_t>(max_moment + 1), 0.0);
  for (const auto& moments : per_grid)
    for (std::size_t n = 0; n < avg.size(); ++n) avg[n] += moments[n];
  for (auto& m : avg) m /= static_cast<double>(grid);
  return avg;
}

KrylovResult krylov_cyclicity(const BandUnitaryWindow& u,
                              const std::vector<std::int64_t>& sites,
                              std::int64_t span_order) {
  if (span_order < 0) throw std::invalid_argument("span_order must be >= 0");
  const std::int64_t n = u.size();
  const std::int64_t cols_per_site = 2 * span_order + 1;
  Eigen::MatrixXcd krylov(n, static_cast<std::int64_t>(sites.size()) * cols_per_site);
  std::int64_t col = 0;
  for (std::int64_t site : sites) {
    const std::int64_t row = u.row_of(site);
    if (row < 0 || row >= n) throw std::out_of_range("site outside the window");
    Eigen::VectorXcd fwd = Eigen::VectorXcd::Zero(n);
    fwd(row) = 1.0;
    Eigen::VectorXcd bwd = fwd;
    krylov.col(col++) = fwd;
    for (std::int64_t k = 1; k <= span_order; ++k) {
      fwd = u.m * fwd;               // U^k |site>
      bwd = u.m.adjoint() * bwd;     // U^{-k} |site>
      krylov.col(col++) = fwd;
      krylov.col(col++) = bwd;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(krylov);
  KrylovResult out;
  out.singular_values.assign(svd.singularValues().data(),
                             svd.singularValues().data() + svd.singularValues().size());
  const double top = out.singular_values.empty() ? 0.0 : out.singular_values.front();
  for (double s : out.singular_values)
    if (s > 1e-8 * top) ++out.rank;
  return out;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return (1.0 - frac) * v[lo] + frac * v[hi];
}

}  // namespace

LocalizationReport localization_report(const PhaseDistribution& nu, double t,
                                       const LocalizationOptions& opts,
                                       std::uint64_t seed) {
  if (opts.window < 4 * opts.edge_sites)
    throw std::invalid_argument("window too small for the edge filter");
  const BandParameters p = BandParameters::from_t(t);
  const std::int64_t w = opts.window;
  const std::int64_t offset = -w / 2;
  const BandUnitaryWindow s = build_s_window(p, w, offset);

  LocalizationReport rep;
  rep.t = t;
  rep.nu_spec = nu.spec_string();
  rep.seed = seed;
  rep.opts = opts;
  rep.realizations.resize(static_cast<std::size_t>(opts.realizations));

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t m = 0; m < opts.realizations; ++m) {
    const DisorderRealization omega =
        sample_phases(nu, derive_seed(seed, static_cast<std::uint64_t>(m)),
                      offset, w);
    const UnitaryEigenDecomposition dec = eig_unitary(apply_phases(s, omega));
    std::vector<EigenvectorStats> stats(static_cast<std::size_t>(w));
    std::vector<double> mags(static_cast<std::size_t>(w));
    for (std::int64_t j = 0; j < w; ++j) {
      EigenvectorStats& es = stats[static_cast<std::size_t>(j)];
      es.eigenphase = dec.eigenphases[static_cast<std::size_t>(j)];
      double inv_pr = 0.0;
      double edge = 0.0;
      for (std::int64_t i = 0; i < w; ++i) {
        const double a2 = std::norm(dec.eigenvectors(i, j));
        inv_pr += a2 * a2;
        if (i < opts.edge_sites || i >= w - opts.edge_sites) edge += a2;
        mags[static_cast<std::size_t>(i)] = std::sqrt(a2);
      }
      es.participation_ratio = 1.0 / inv_pr;
      es.edge_mass = edge;
      es.insulated = edge < opts.edge_mass_threshold;
      // Entries near the eigensolver noise floor (~1e-16 absolute) carry no
      // decay information; drop them from the fit instead of letting the
      // noise plateau flatten the slope.
      const double peak = *std::max_element(mags.begin(), mags.end());
      for (double& mag : mags)
        if (mag < 1e-12 * peak) mag = 0.0;
      try {
        es.decay_rate = decay_rate_fit(mags, offset, offset + opts.edge_sites,
                                       offset + w - opts.edge_sites)
                            .rate_per_site;
      } catch (const std::exception&) {
        es.decay_rate = std::numeric_limits<double>::quiet_NaN();
      }
    }
    rep.realizations[static_cast<std::size_t>(m)] = std::move(stats);
  }

  if (opts.with_lyapunov) {
    const LyapunovPair lp = estimate_lyapunov(
        nu, p, 0.0, opts.lyap, derive_seed(seed, 0x6a77aULL));
    rep.gamma_hat = lp.forward.gamma_hat;
    rep.gamma_std_error = lp.forward.std_error;
  }

  const ArcSet sigma = almost_sure_spectrum(nu, t);
  std::vector<double> decay_ins, decay_all, prs, dists;
  std::int64_t contained = 0;
  for (const auto& stats : rep.realizations) {
    for (const EigenvectorStats& es : stats) {
      prs.push_back(es.participation_ratio);
      if (std::isfinite(es.decay_rate)) decay_all.push_back(es.decay_rate);
      if (!es.insulated) continue;
      ++rep.insulated_count;
      if (std::isfinite(es.decay_rate)) decay_ins.push_back(es.decay_rate);
      dists.push_back(sigma.distance(es.eigenphase));
      if (sigma.contains(es.eigenphase, opts.eps)) ++contained;
    }
  }
  rep.median_decay_insulated = median(std::move(decay_ins));
  rep.median_decay_all = median(std::move(decay_all));
  rep.median_participation_ratio = median(std::move(prs));
  rep.containment_fraction =
      rep.insulated_count > 0
          ? static_cast<double>(contained) / static_cast<double>(rep.insulated_count)
          : std::numeric_limits<double>::quiet_NaN();
  rep.q99_distance = quantile(std::move(dists), 0.99);
  return rep;
}

std::string LocalizationReport::to_json() const {
  nlohmann::json j;
  j["t"] = t;
  j["nu"] = nu_spec;
  j["seed"] = seed;
  j["window"] = opts.window;
  j["realizations"] = opts.realizations;
  j["eps"] = opts.eps;
  j["edge_sites"] = opts.edge_sites;
  j["edge_mass_threshold"] = opts.edge_mass_threshold;
  j["gamma_hat_per_step"] = gamma_hat;
  j["gamma_std_error"] = gamma_std_error;
  j["gamma_hat_per_site"] = 0.5 * gamma_hat;
  j["median_decay_insulated"] = median_decay_insulated;
  j["median_decay_all"] = median_decay_all;
  j["median_participation_ratio"] = median_participation_ratio;
  j["containment_fraction"] = containment_fraction;
  j["q99_distance"] = q99_distance;
  j["insulated_count"] = insulated_count;
  nlohmann::json reals = nlohmann::json::array();
  for (const auto& stats : realizations) {
    nlohmann::json arr = nlohmann::json::array();
    for (const EigenvectorStats& es : stats)
      arr.push_back({{"eigenphase", es.eigenphase},
                     {"decay_rate", es.decay_rate},
                     {"participation_ratio", es.participation_ratio},
                     {"edge_mass", es.edge_mass},
                     {"insulated", es.insulated}});
    reals.push_back(std::move(arr));
  }
  j["eigenvectors"] = std::move(reals);
  return j.dump(2);
}

}  // namespace uband
