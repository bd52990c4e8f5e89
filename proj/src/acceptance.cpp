#include "uband/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "uband/angles.hpp"
#include "uband/arcs.hpp"
#include "uband/disorder.hpp"
#include "uband/fuerstenberg.hpp"
#include "uband/operator_core.hpp"
#include "uband/rng.hpp"
#include "uband/spectral.hpp"
#include "uband/transfer.hpp"

namespace uband {

namespace {

using Complex = std::complex<double>;

/// Collects named checks; a criterion passes when every check passes.
class Checks {
 public:
  void require(const std::string& what, double value, double limit) {
    const bool ok = value < limit;
    passed_ = passed_ && ok;
    if (!ok) note("FAIL " + what + " = " + fmt(value) + " (limit " + fmt(limit) + ")");
    worst_[what] = std::max(worst_.count(what) ? worst_[what] : 0.0, value);
  }
  void require_true(const std::string& what, bool ok, const std::string& info = "") {
    passed_ = passed_ && ok;
    if (!ok) note("FAIL " + what + (info.empty() ? "" : " [" + info + "]"));
  }
  void note(const std::string& line) {
    if (!detail_.empty()) detail_ += "; ";
    detail_ += line;
  }
  bool passed() const { return passed_; }
  std::string detail() const {
    std::string d = detail_;
    for (const auto& [k, v] : worst_) {
      if (!d.empty()) d += "; ";
      d += "max " + k + " = " + fmt(v);
    }
    return d;
  }

 private:
  static std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
  }
  bool passed_ = true;
  std::string detail_;
  std::map<std::string, double> worst_;
};

template <typename F>
CriterionResult timed(int index, const std::string& name, F body) {
  CriterionResult r;
  r.index = index;
  r.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  Checks c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.require_true("no exception", false, e.what());
  }
  r.passed = c.passed();
  r.detail = c.detail();
  r.seconds = std::chrono::duration<double>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  return r;
}

double pattern_defect_full(const BandUnitaryWindow& w) {
  // Interior rows of the doubly infinite operator, by lattice parity:
  //   even row 2k : (rt, r^2, rt, -t^2) at columns 2k-1 .. 2k+2
  //   odd row 2k+1: (-t^2, -rt, r^2, -rt) at columns 2k-1 .. 2k+2
  const double r = w.params.r, t = w.params.t;
  const double rt = r * t, r2 = r * r, mt2 = -(t * t);
  double defect = 0.0;
  for (std::int64_t k = w.offset; k < w.offset + w.size(); ++k) {
    const bool even = ((k % 2) + 2) % 2 == 0;
    const std::int64_t lo = even ? k - 1 : k - 2;  // first band column
    if (lo - 2 < w.offset || lo + 5 >= w.offset + w.size()) continue;
    const std::int64_t row = w.row_of(k);
    const std::int64_t c0 = w.row_of(lo);
    const double want[4] = {even ? rt : mt2, even ? r2 : -rt,
                            even ? rt : r2, even ? mt2 : -rt};
    for (int d = 0; d < 4; ++d)
      defect = std::max(defect, std::abs(w.m(row, c0 + d) - want[d]));
    // everything outside the four-entry band must vanish exactly
    for (std::int64_t c = 0; c < w.size(); ++c)
      if (c < c0 || c >= c0 + 4)
        defect = std::max(defect, std::abs(w.m(row, c)));
  }
  return defect;
}

}  // namespace

CriterionResult criterion_exact_identities(std::uint64_t seed) {
  return timed(1, "exact algebraic identities", [seed](Checks& c) {
    // Unitarity of every window flavor, defect limit by size.
    for (std::int64_t n : {std::int64_t{4}, std::int64_t{16}, std::int64_t{200},
                           std::int64_t{500}, std::int64_t{2000}}) {
      const double tol = n <= 500 ? 1e-12 : 1e-10;
      for (double t : {0.2, 0.5, 0.8}) {
        const BandParameters p = BandParameters::from_t(t);
        const BandUnitaryWindow s = build_s_window(p, n, -n / 2);
        c.require("unitarity S", unitarity_defect(s.m), tol);
        const BandUnitaryWindow sp = build_s_plus(p, n);
        c.require("unitarity S+", unitarity_defect(sp.m), tol);
        const DisorderRealization om = sample_phases(
            PhaseDistribution::uniform(), derive_seed(seed, n), -n / 2, n);
        c.require("unitarity U", unitarity_defect(apply_phases(s, om).m), tol);
        c.require("det modulus", std::abs(det_modulus(s.m) - 1.0), 1e-10);
      }
    }
    {
      const DisorderRealization om =
          sample_phases(PhaseDistribution::uniform(), seed, 0, 500);
      const VerblunskiPhaseSequence v = correlated_verblunski(om, 0.6);
      c.require("unitarity CMV", unitarity_defect(build_cmv(v, 500).m), 1e-12);
      c.require("cmv conjugation", cmv_conjugation_check(v, 0.3, 500), 1e-12);
    }

    // Interior entry patterns, exact at one rounding of r*t, r*r, t*t.
    for (double t : {0.2, 0.5, 0.8}) {
      const BandParameters p = BandParameters::from_t(t);
      c.require("band pattern", pattern_defect_full(build_s_window(p, 32, -15)),
                1e-15);
      const BandUnitaryWindow sp = build_s_plus(p, 16);
      c.require("S+ first column",
                std::max(std::abs(sp.m(0, 0) - Complex(-p.r)),
                         std::abs(sp.m(1, 0) - Complex(p.t))),
                1e-15);
    }

    // det T(theta, eta) = e^{i(theta - eta)} over 1e4 samples.
    {
      const BandParameters p = BandParameters::from_t(0.5);
      double worst = 0.0;
      for (int i = 0; i < 10000; ++i) {
        const double th = two_pi * uniform01(seed, 11, i);
        const double et = two_pi * uniform01(seed, 12, i);
        const Complex want = std::polar(1.0, th - et);
        worst = std::max(worst,
                         std::abs(transfer_matrix(th, et, p).m.determinant() - want));
      }
      c.require("det T", worst, 1e-14);
    }

    // Cyclicity vector identities, random phases, three band parameters.
    for (double t : {0.2, 0.5, 0.8}) {
      const BandParameters p = BandParameters::from_t(t);
      const DisorderRealization om = sample_phases(
          PhaseDistribution::uniform(), derive_seed(seed, 21), -10, 20);
      const BandUnitaryWindow u = apply_phases(build_s_window(p, 20, -10), om);
      for (const auto& [name, defect] : cyclicity_identity_check(u))
        c.require("cyclicity " + name, defect, 1e-12);
      const DisorderRealization omp = sample_phases(
          PhaseDistribution::uniform(), derive_seed(seed, 22), 0, 20);
      c.require("half-lattice cyclicity",
                half_lattice_cyclicity_check(apply_phases(build_s_plus(p, 20), omp)),
                1e-12);
    }

    // Real-lift multiplicativity on random matrices.
    {
      double worst = 0.0;
      for (int i = 0; i < 200; ++i) {
        Eigen::Matrix2cd a, b;
        for (int e = 0; e < 4; ++e) {
          a(e / 2, e % 2) = Complex(2 * uniform01(seed, 31, 8 * i + e) - 1,
                                    2 * uniform01(seed, 32, 8 * i + e) - 1);
          b(e / 2, e % 2) = Complex(2 * uniform01(seed, 33, 8 * i + e) - 1,
                                    2 * uniform01(seed, 34, 8 * i + e) - 1);
        }
        worst = std::max(worst, (tau_lift(a * b).matrix -
                                 tau_lift(a).matrix * tau_lift(b).matrix)
                                    .cwiseAbs()
                                    .maxCoeff());
      }
      c.require("lift homomorphism", worst, 1e-13);
    }
  });
}

CriterionResult criterion_group_certificate(std::uint64_t /*seed*/) {
  return timed(2, "group-element certificate", [](Checks& c) {
    // Entries grow like 1/t^4; the smallest t keeps the 1e-10 determinant
    // tolerance a couple of decades above accumulated roundoff.
    for (double t : {0.4, 0.5, 0.6, 0.75, 0.9}) {
      const BandParameters p = BandParameters::from_t(t);
      const StructureMatrices s = structure_matrices(p);
      c.require("A2 identity",
                (s.a2 + s.a0 + Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff(),
                0.0 + 1e-300);  // exact by construction

      for (int i = 0; i < 16; ++i) {
        const double theta = two_pi * i / 16.0;

        // Diagonal family: tau(T(th, th)) = A0 + A1 sin + A2 cos.
        const Eigen::Matrix4d lhs = tau_lift(transfer_matrix(theta, theta, p).m).matrix;
        const Eigen::Matrix4d rhs =
            s.a0 + s.a1 * std::sin(theta) + s.a2 * std::cos(theta);
        c.require("diagonal family", (lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);

        // Derivative family, both analytically and by central difference.
        const Eigen::Matrix4d want =
            s.b0 + s.b1 * std::sin(theta) + s.b2 * std::cos(theta);
        c.require("derivative family (analytic)",
                  (tau_lift(transfer_dtheta(theta, theta, p)).matrix - want)
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-12);
        const double h = 1e-6;
        const Eigen::Matrix4d fd =
            (tau_lift(transfer_matrix(theta + h, theta, p).m).matrix -
             tau_lift(transfer_matrix(theta - h, theta, p).m).matrix) /
            (2.0 * h);
        c.require("derivative family (finite diff)",
                  (fd - want).cwiseAbs().maxCoeff(), 1e-6);

        for (int j = 0; j < 16; ++j) {
          const double eta = two_pi * j / 16.0;
          const FuerstenbergCertificate cert = group_elements(theta, eta, p);
          for (const char* key :
               {"c_closed_vs_product", "e_closed_vs_product",
                "l_closed_vs_product", "j_closed_vs_product", "det_l", "det_j",
                "jinv_minus_lstar"})
            c.require(key, cert.identity_defects.at(key), 1e-12);
          c.require("det_k", cert.identity_defects.at("det_k"), 1e-10);
          c.require("k_selfadjoint", cert.identity_defects.at("k_selfadjoint"),
                    1e-10);
          c.require("trace_formula", cert.identity_defects.at("trace_formula"),
                    1e-10);
          Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(
              0.5 * (cert.k + cert.k.adjoint()));
          c.require_true("K positive definite", es.eigenvalues().minCoeff() > 0.0);
          if (circular_distance(theta, eta) > 1e-6)
            c.require_true("trace K > 2 off the diagonal", cert.trace_k > 2.0);
        }
      }
    }
  });
}

CriterionResult criterion_lyapunov_calibration(std::uint64_t seed) {
  return timed(3, "growth-rate estimator calibration", [seed](Checks& c) {
    const BandParameters p = BandParameters::from_t(0.5);
    const PhaseDistribution nu = PhaseDistribution::atoms({0.0}, {1.0});
    const ArcSet band = spectrum_of_s(0.5);
    LyapunovOptions opts;
    opts.steps = 20000;
    opts.runs = 4;
    for (int i = 0; i < 16; ++i) {
      const double alpha = two_pi * i / 16.0;
      const LyapunovPair lp =
          estimate_lyapunov(nu, p, alpha, opts, derive_seed(seed, i));
      // 2x2 eigenvalue oracle: constant cocycle matrix T(alpha, alpha).
      const Eigen::Vector2cd ev =
          transfer_matrix(alpha, alpha, p).m.eigenvalues();
      const double log_rho =
          std::log(std::max(std::abs(ev(0)), std::abs(ev(1))));
      if (band.contains(alpha)) {
        c.require("inside-band gamma", lp.forward.gamma_hat, 0.02);
      } else {
        c.require("outside-band oracle gap",
                  std::abs(lp.forward.gamma_hat - log_rho), 0.01);
      }
      // Atomic disorder has zero run-to-run spread; allow the O(1/steps)
      // finite-product transient on top of the statistical band.
      const double allowance =
          3.0 * (lp.forward.std_error + lp.backward.std_error) +
          20.0 / static_cast<double>(opts.steps);
      c.require("forward/backward gap",
                std::abs(lp.forward.gamma_hat - lp.backward.gamma_hat),
                allowance);
    }
  });
}

CriterionResult criterion_positivity_sweep(std::uint64_t seed) {
  return timed(4, "growth-rate positivity sweep", [seed](Checks& c) {
    LyapunovOptions opts;
    opts.steps = 100000;
    opts.runs = 16;
    const std::vector<PhaseDistribution> nus = {
        PhaseDistribution::arc(0.0, 0.5), PhaseDistribution::uniform()};
    int combo = 0;
    double worst_margin = 1e300;
    for (double t : {0.2, 0.5, 0.8}) {
      const BandParameters p = BandParameters::from_t(t);
      for (const PhaseDistribution& nu : nus) {
        for (int i = 0; i < 32; ++i) {
          const double alpha = two_pi * i / 32.0;
          const LyapunovPair lp =
              estimate_lyapunov(nu, p, alpha, opts, derive_seed(seed, combo++));
          for (const LyapunovEstimate* e : {&lp.forward, &lp.backward}) {
            const double margin = e->gamma_hat - 3.0 * e->std_error;
            worst_margin = std::min(worst_margin, margin);
            c.require_true("gamma - 3*stderr > 0", margin > 0.0);
          }
        }
      }
    }
    c.note("worst margin " + std::to_string(worst_margin));
  });
}

CriterionResult criterion_localization_evidence(std::uint64_t seed) {
  return timed(5, "localization evidence", [seed](Checks& c) {
    LocalizationOptions big;
    big.window = 1000;
    big.realizations = 20;
    big.lyap.steps = 100000;
    big.lyap.runs = 16;
    LocalizationOptions small = big;
    small.window = 500;
    small.with_lyapunov = false;

    const PhaseDistribution nu = PhaseDistribution::uniform();
    const LocalizationReport rep1000 =
        localization_report(nu, 0.5, big, derive_seed(seed, 51));
    const LocalizationReport rep500 =
        localization_report(nu, 0.5, small, derive_seed(seed, 52));

    const double site_rate = 0.5 * rep1000.gamma_hat;
    c.require_true(
        "median insulated decay in [0.8, 1.2] * gamma/2",
        rep1000.median_decay_insulated > 0.8 * site_rate &&
            rep1000.median_decay_insulated < 1.2 * site_rate,
        "median " + std::to_string(rep1000.median_decay_insulated) +
            ", gamma/2 " + std::to_string(site_rate));
    c.require_true("participation ratio non-increasing under doubling",
                   rep1000.median_participation_ratio <=
                       1.1 * rep500.median_participation_ratio,
                   std::to_string(rep500.median_participation_ratio) + " -> " +
                       std::to_string(rep1000.median_participation_ratio));

    // Deterministic control: extended states, participation grows with the
    // window and the fitted decay stays near zero.
    LocalizationOptions ctrl = small;
    ctrl.realizations = 1;
    const PhaseDistribution atom = PhaseDistribution::atoms({0.0}, {1.0});
    const LocalizationReport c500 =
        localization_report(atom, 0.5, ctrl, derive_seed(seed, 53));
    ctrl.window = 1000;
    const LocalizationReport c1000 =
        localization_report(atom, 0.5, ctrl, derive_seed(seed, 54));
    c.require_true("control participation grows >= 1.5x",
                   c1000.median_participation_ratio >=
                       1.5 * c500.median_participation_ratio,
                   std::to_string(c500.median_participation_ratio) + " -> " +
                       std::to_string(c1000.median_participation_ratio));
    c.require("control decay rate", std::abs(c1000.median_decay_all), 0.01);
  });
}

CriterionResult criterion_spectrum_containment(std::uint64_t seed) {
  return timed(6, "spectrum containment", [seed](Checks& c) {
    const PhaseDistribution nu = PhaseDistribution::arc(0.0, 0.3);
    LocalizationOptions opts;
    opts.window = 500;
    opts.realizations = 10;
    opts.eps = 0.05;
    opts.with_lyapunov = false;
    const LocalizationReport rep500 =
        localization_report(nu, 0.5, opts, derive_seed(seed, 61));
    c.require_true("containment >= 99% at eps = 0.05, window 500",
                   rep500.containment_fraction >= 0.99,
                   std::to_string(rep500.containment_fraction));

    opts.window = 1000;
    const LocalizationReport rep1000 =
        localization_report(nu, 0.5, opts, derive_seed(seed, 62));
    // The needed fattening (99th-percentile distance to Sigma) should halve
    // under window doubling, within a factor 1.5; a small absolute floor
    // keeps the test meaningful when both distances sit at roundoff level.
    const double d500 = rep500.q99_distance;
    const double d1000 = rep1000.q99_distance;
    c.require_true("fattening halves under doubling (factor 1.5)",
                   d1000 <= std::max(0.75 * d500, 1e-3),
                   "q99 " + std::to_string(d500) + " -> " + std::to_string(d1000));
  });
}

CriterionResult criterion_spectral_averaging(std::uint64_t seed) {
  return timed(7, "spectral averaging", [seed](Checks& c) {
    const std::int64_t window = 200;
    const BandParameters p = BandParameters::from_t(0.5);
    const DisorderRealization om = sample_phases(PhaseDistribution::uniform(),
                                                 seed, -window / 2, window);
    const auto m256 = spectral_averaging_experiment(om, 256, window, p, 5);
    const auto m512 = spectral_averaging_experiment(om, 512, window, p, 5);
    c.require("averaged mass defect", std::abs(m256[0] - 1.0), 1e-10);
    double err256 = 0.0, err512 = 0.0;
    for (int n = 1; n <= 5; ++n) {
      c.require("averaged moment (grid 256)", std::abs(m256[static_cast<std::size_t>(n)]), 1e-2);
      err256 = std::max(err256, std::abs(m256[static_cast<std::size_t>(n)]));
      err512 = std::max(err512, std::abs(m512[static_cast<std::size_t>(n)]));
    }
    // A uniform grid integrates the low trigonometric moments exactly, so
    // both errors can sit at roundoff; below the floor the ratio test would
    // only compare noise.
    c.require_true("grid-doubling ratio < 0.6 (or both below 1e-8)",
                   err512 < 0.6 * err256 || (err256 < 1e-8 && err512 < 1e-8),
                   std::to_string(err256) + " -> " + std::to_string(err512));
  });
}

CriterionResult criterion_cyclicity_rank(std::uint64_t seed) {
  return timed(8, "Krylov cyclicity rank", [seed](Checks& c) {
    const std::int64_t window = 40;
    // Reaching the far edge of the window through U^k carries an amplitude
    // ~ t^(2k), which bounds the smallest singular value of the Krylov
    // matrix; t = 0.8 keeps it decades above the numerical-rank cutoff.
    const BandParameters p = BandParameters::from_t(0.8);
    const PhaseDistribution nu = PhaseDistribution::uniform();
    for (int trial = 0; trial < 20; ++trial) {
      const std::uint64_t s = derive_seed(seed, 80 + trial);
      const DisorderRealization om = sample_phases(nu, s, -window / 2, window);
      const BandUnitaryWindow u =
          apply_phases(build_s_window(p, window, -window / 2), om);
      c.require_true(
          "full-lattice rank = window",
          krylov_cyclicity(u, {-1, 0}, 12).rank == window);

      const DisorderRealization omp = sample_phases(nu, s, 0, window);
      const BandUnitaryWindow up = apply_phases(build_s_plus(p, window), omp);
      c.require_true("half-lattice rank = window",
                     krylov_cyclicity(up, {0}, 22).rank == window);

      // Pure-phase diagonal control: Krylov vectors are colinear per site.
      const BandUnitaryWindow d = build_diagonal(om);
      c.require_true("diagonal control rank = #sites (two sites)",
                     krylov_cyclicity(d, {-1, 0}, 12).rank == 2);
      c.require_true("diagonal control rank = #sites (one site)",
                     krylov_cyclicity(d, {0}, 22).rank == 1);
    }
  });
}

std::vector<CriterionResult> run_acceptance(std::uint64_t seed,
                                            std::ostream* log) {
  std::vector<CriterionResult> results;
  CriterionResult (*criteria[])(std::uint64_t) = {
      criterion_exact_identities,    criterion_group_certificate,
      criterion_lyapunov_calibration, criterion_positivity_sweep,
      criterion_localization_evidence, criterion_spectrum_containment,
      criterion_spectral_averaging,  criterion_cyclicity_rank};
  for (auto* fn : criteria) {
    results.push_back(fn(seed));
    if (log) {
      const CriterionResult& r = results.back();
      (*log) << (r.passed ? "PASS" : "FAIL") << " criterion " << r.index
             << " (" << r.name << ") [" << r.seconds << " s]"
             << (r.detail.empty() ? "" : " -- " + r.detail) << "\n";
      log->flush();
    }
  }
  return results;
}

}  // namespace uband
