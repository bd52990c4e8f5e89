// Batch experiment runner: every library module exposed as a seeded,
// reproducible subcommand with machine-readable CSV/JSON output.
//
// Exit codes: 0 success, 2 validation failure, 3 numerical-check failure.

#include <omp.h>

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "uband/acceptance.hpp"
#include "uband/angles.hpp"
#include "uband/arcs.hpp"
#include "uband/disorder.hpp"
#include "uband/fuerstenberg.hpp"
#include "uband/operator_core.hpp"
#include "uband/rng.hpp"
#include "uband/spectral.hpp"
#include "uband/transfer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CLI::ValidationError("--out", "cannot open " + path);
  return out;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct AlphaGrid {
  double start = 0.0;
  double end = uband::two_pi;
  int points = 32;
};

AlphaGrid parse_alpha_grid(const std::string& s) {
  AlphaGrid g;
  if (std::sscanf(s.c_str(), "%lf,%lf,%d", &g.start, &g.end, &g.points) != 3 ||
      g.points < 1)
    throw CLI::ValidationError("--alpha-grid", "expected start,end,points");
  return g;
}

int cmd_build(const std::string& flavor, double t, std::int64_t size,
              std::int64_t offset, const std::string& nu_spec,
              std::uint64_t seed, double alpha, const std::string& boundary,
              const std::string& out_path) {
  using namespace uband;
  const BandParameters p = BandParameters::from_t(t);
  const BoundaryMode mode = boundary == "wrap" ? BoundaryMode::Wrap
                                               : BoundaryMode::ScalarCompletion;
  BandUnitaryWindow w;
  if (flavor == "s") {
    w = build_s_window(p, size, offset, mode);
  } else if (flavor == "s-plus") {
    w = build_s_plus(p, size);
  } else if (flavor == "u" || flavor == "u-plus" || flavor == "diagonal") {
    const PhaseDistribution nu = PhaseDistribution::parse(nu_spec);
    const std::int64_t first = flavor == "u" ? offset : 0;
    const DisorderRealization om = sample_phases(nu, seed, first, size);
    if (flavor == "diagonal")
      w = build_diagonal(om);
    else
      w = apply_phases(flavor == "u" ? build_s_window(p, size, offset, mode)
                                     : build_s_plus(p, size),
                       om, alpha);
  } else if (flavor == "cmv") {
    const PhaseDistribution nu = PhaseDistribution::parse(nu_spec);
    const DisorderRealization om = sample_phases(nu, seed, 0, size);
    w = build_cmv(correlated_verblunski(om, p.r), size);
  } else {
    throw CLI::ValidationError("--flavor", "unknown flavor " + flavor);
  }
  const double defect = unitarity_defect(w.m);
  dump_window(w, out_path);
  std::cout << "build: " << flavor_name(w.flavor) << " size " << w.size()
            << " offset " << w.offset << " unitarity defect " << defect
            << " -> " << out_path << "\n";
  return defect < 1e-10 ? kExitOk : kExitNumerical;
}

int cmd_lyapunov(double t, const std::string& nu_spec, const AlphaGrid& grid,
                 std::int64_t steps, std::int64_t runs, std::uint64_t seed,
                 bool backward, const std::string& out_path) {
  using namespace uband;
  const BandParameters p = BandParameters::from_t(t);
  const PhaseDistribution nu = PhaseDistribution::parse(nu_spec);
  LyapunovOptions opts;
  opts.steps = steps;
  opts.runs = runs;
  std::ofstream out = open_out(out_path);
  out << "alpha,gamma_hat,stderr,gamma_per_site,steps,runs,t,nu_spec,seed\n";
  double min_margin = 1e300;
  for (int i = 0; i < grid.points; ++i) {
    const double alpha =
        grid.points == 1
            ? grid.start
            : grid.start + (grid.end - grid.start) * i / (grid.points - 1.0);
    const LyapunovPair lp =
        estimate_lyapunov(nu, p, alpha, opts, derive_seed(seed, i));
    const LyapunovEstimate& e = backward ? lp.backward : lp.forward;
    out << fmt17(alpha) << ',' << fmt17(e.gamma_hat) << ','
        << fmt17(e.std_error) << ',' << fmt17(e.gamma_per_site()) << ','
        << steps << ',' << runs << ',' << fmt17(t) << ',' << nu.spec_string()
        << ',' << seed << '\n';
    min_margin = std::min(min_margin, e.gamma_hat - 3.0 * e.std_error);
  }
  std::cout << "lyapunov: " << grid.points << " grid points, min(gamma - 3se) "
            << min_margin << " -> " << out_path << "\n";
  return kExitOk;
}

int cmd_spectrum(double t, const std::string& nu_spec, std::int64_t window,
                 double eps, std::uint64_t seed, const std::string& out_path) {
  using namespace uband;
  const BandParameters p = BandParameters::from_t(t);
  const PhaseDistribution nu = PhaseDistribution::parse(nu_spec);
  const std::int64_t offset = -window / 2;
  const DisorderRealization om = sample_phases(nu, seed, offset, window);
  const UnitaryEigenDecomposition dec =
      eig_unitary(apply_phases(build_s_window(p, window, offset), om));
  const ArcSet sigma = almost_sure_spectrum(nu, t);
  std::ofstream out = open_out(out_path);
  out << "eigenphase,distance_to_sigma,inside_fattened\n";
  std::int64_t inside = 0;
  for (double phase : dec.eigenphases) {
    const bool in = sigma.contains(phase, eps);
    inside += in ? 1 : 0;
    out << fmt17(phase) << ',' << fmt17(sigma.distance(phase)) << ','
        << (in ? 1 : 0) << '\n';
  }
  std::cout << "spectrum: window " << window << ", residual " << dec.residual
            << ", " << inside << "/" << dec.size()
            << " eigenphases inside fattened support -> " << out_path << "\n";
  return dec.residual < 1e-9 ? kExitOk : kExitNumerical;
}

int cmd_localize(double t, const std::string& nu_spec, std::int64_t window,
                 std::int64_t realizations, double eps, std::uint64_t seed,
                 std::int64_t steps, std::int64_t runs,
                 const std::string& out_path, const std::string& hist_path,
                 int bins) {
  using namespace uband;
  const PhaseDistribution nu = PhaseDistribution::parse(nu_spec);
  LocalizationOptions opts;
  opts.window = window;
  opts.realizations = realizations;
  opts.eps = eps;
  opts.lyap.steps = steps;
  opts.lyap.runs = runs;
  const LocalizationReport rep = localization_report(nu, t, opts, seed);
  open_out(out_path) << rep.to_json() << "\n";
  if (!hist_path.empty()) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
    for (const auto& stats : rep.realizations)
      for (const EigenvectorStats& es : stats) {
        auto b = static_cast<std::size_t>(es.eigenphase / two_pi * bins);
        ++counts[std::min(b, counts.size() - 1)];
      }
    std::ofstream hist = open_out(hist_path);
    hist << "bin_center,count\n";
    for (int b = 0; b < bins; ++b)
      hist << fmt17(two_pi * (b + 0.5) / bins) << ',' << counts[static_cast<std::size_t>(b)] << '\n';
  }
  std::cout << "localize: median insulated decay " << rep.median_decay_insulated
            << " (gamma/2 = " << 0.5 * rep.gamma_hat << "), containment "
            << rep.containment_fraction << " -> " << out_path << "\n";
  return kExitOk;
}

int cmd_average(double t, const std::string& nu_spec, std::int64_t window,
                std::int64_t grid, std::uint64_t seed,
                const std::string& out_path) {
  using namespace uband;
  const PhaseDistribution nu = PhaseDistribution::parse(nu_spec);
  const DisorderRealization om = sample_phases(nu, seed, -window / 2, window);
  const auto moments = spectral_averaging_experiment(
      om, grid, window, BandParameters::from_t(t));
  std::ofstream out = open_out(out_path);
  out << "n,re,im,abs\n";
  for (std::size_t n = 0; n < moments.size(); ++n)
    out << n << ',' << fmt17(moments[n].real()) << ','
        << fmt17(moments[n].imag()) << ',' << fmt17(std::abs(moments[n]))
        << '\n';
  std::cout << "average: grid " << grid << ", max |m_n| (n >= 1) ";
  double worst = 0.0;
  for (std::size_t n = 1; n < moments.size(); ++n)
    worst = std::max(worst, std::abs(moments[n]));
  std::cout << worst << " -> " << out_path << "\n";
  return kExitOk;
}

int cmd_fuerstenberg(double t, double theta, double eta, std::int64_t powers,
                     const std::string& out_path) {
  using namespace uband;
  const FuerstenbergCertificate cert =
      group_elements(theta, eta, BandParameters::from_t(t));
  nlohmann::json j = nlohmann::json::parse(cert.to_json());
  if (powers > 0 && circular_distance(theta, eta) > 1e-12)
    j["growth_probe"] = noncompactness_probe(theta, eta, cert.p, powers);
  const std::string text = j.dump(2);
  if (out_path.empty())
    std::cout << text << "\n";
  else
    open_out(out_path) << text << "\n";
  double worst = 0.0;
  for (const auto& [name, v] : cert.identity_defects) worst = std::max(worst, v);
  std::cout << "fuerstenberg: trace K " << cert.trace_k << ", max defect "
            << worst << ", noncompact_witnessed "
            << (cert.noncompact_witnessed() ? "true" : "false") << "\n";
  return worst < 1e-10 ? kExitOk : kExitNumerical;
}

int cmd_cmv_check(double r, std::int64_t size, std::uint64_t seed,
                  double beta0) {
  using namespace uband;
  const DisorderRealization om =
      sample_phases(PhaseDistribution::uniform(), seed, 0, size);
  const double defect =
      cmv_conjugation_check(correlated_verblunski(om, r), beta0, size);
  std::cout << "cmv-check: size " << size << " interior defect " << defect
            << "\n";
  return defect < 1e-12 ? kExitOk : kExitNumerical;
}

int cmd_cyclicity(double t, std::int64_t window, std::int64_t trials,
                  std::uint64_t seed) {
  using namespace uband;
  const BandParameters p = BandParameters::from_t(t);
  const PhaseDistribution nu = PhaseDistribution::uniform();
  bool ok = true;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(trial));
    const DisorderRealization om = sample_phases(nu, s, -window / 2, window);
    const auto full = krylov_cyclicity(
        apply_phases(build_s_window(p, window, -window / 2), om), {-1, 0},
        window / 2 + 2);
    const DisorderRealization omp = sample_phases(nu, s, 0, window);
    const auto half = krylov_cyclicity(
        apply_phases(build_s_plus(p, window), omp), {0}, window / 2 + 2);
    const auto diag = krylov_cyclicity(build_diagonal(om), {-1, 0}, 4);
    std::cout << "trial " << trial << ": full rank " << full.rank << "/"
              << window << ", half rank " << half.rank << "/" << window
              << ", diagonal control rank " << diag.rank << "/2\n";
    ok = ok && full.rank == window && half.rank == window && diag.rank == 2;
  }
  std::cout << "cyclicity: " << (ok ? "all ranks as predicted"
                                    : "rank mismatch detected")
            << "\n";
  return ok ? kExitOk : kExitNumerical;
}

int cmd_selftest(std::uint64_t seed) {
  const auto results = uband::run_acceptance(seed, &std::cout);
  for (const auto& r : results)
    if (!r.passed) return kExitNumerical;
  std::cout << "selftest: all criteria passed\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random unitary band-matrix laboratory"};
  app.fallthrough();  // let subcommands see --config/--jobs given after them
  app.set_config("--config", "",
                 "key=value config file with a [subcommand] section; "
                 "command-line flags override");
  int jobs = 0;
  app.add_option("--jobs", jobs, "max concurrent tasks (default: hardware)");

  // Shared option storage; each subcommand registers the flags it uses.
  double t = 0.5, alpha = 0.0, theta = 0.0, eta = 3.141592653589793;
  double eps = 0.05, r = 0.6, beta0 = 0.0;
  std::string nu_spec = "uniform", flavor = "u", boundary = "scalar";
  std::string out_path = "out.csv", hist_path;
  std::string alpha_grid = "0,6.283185307179586,32";
  std::uint64_t seed = 1;
  std::int64_t size = 100, offset = -50, window = 500, realizations = 10;
  std::int64_t steps = 100000, runs = 16, grid = 256, trials = 20, powers = 64;
  int bins = 64;

  auto* build = app.add_subcommand("build", "construct and dump one operator window");
  build->add_option("--flavor", flavor, "s | s-plus | u | u-plus | cmv | diagonal");
  build->add_option("--t", t, "band parameter in (0,1)");
  build->add_option("--size", size, "window size (even)");
  build->add_option("--offset", offset, "lattice index of row 0 (full-lattice flavors)");
  build->add_option("--nu", nu_spec, "phase distribution spec");
  build->add_option("--seed", seed, "64-bit seed");
  build->add_option("--alpha", alpha, "spectral shift (radians)");
  build->add_option("--boundary", boundary, "scalar | wrap");
  build->add_option("--out", out_path, "output path (CSV dump)");

  auto* lyap = app.add_subcommand("lyapunov", "Monte-Carlo growth-rate sweep over alpha");
  bool backward = false;
  lyap->add_option("--t", t);
  lyap->add_option("--nu", nu_spec, "phase distribution spec");
  lyap->add_option("--alpha-grid", alpha_grid, "start,end,points");
  lyap->add_option("--steps", steps);
  lyap->add_option("--runs", runs);
  lyap->add_option("--seed", seed);
  lyap->add_flag("--backward", backward, "report the backward cocycle estimate");
  lyap->add_option("--out", out_path, "output CSV path");

  auto* spec = app.add_subcommand("spectrum", "eigenphases and containment in the almost-sure support");
  spec->add_option("--t", t);
  spec->add_option("--nu", nu_spec);
  spec->add_option("--window", window);
  spec->add_option("--eps", eps, "support fattening (radians)");
  spec->add_option("--seed", seed);
  spec->add_option("--out", out_path, "output CSV path");

  auto* loc = app.add_subcommand("localize", "localization evidence report (JSON)");
  loc->add_option("--t", t);
  loc->add_option("--nu", nu_spec);
  loc->add_option("--window", window);
  loc->add_option("--realizations", realizations);
  loc->add_option("--eps", eps);
  loc->add_option("--seed", seed);
  loc->add_option("--steps", steps, "growth-estimate steps");
  loc->add_option("--runs", runs, "growth-estimate runs");
  loc->add_option("--out", out_path, "output JSON path");
  loc->add_option("--histogram", hist_path, "optional eigenphase histogram CSV");
  loc->add_option("--bins", bins, "histogram bins");

  auto* avg = app.add_subcommand("average", "spectral measure averaged over a theta_0 grid");
  avg->add_option("--t", t);
  avg->add_option("--nu", nu_spec, "distribution for the fixed other phases");
  avg->add_option("--window", window);
  avg->add_option("--grid", grid, "number of theta_0 grid points");
  avg->add_option("--seed", seed);
  avg->add_option("--out", out_path, "output CSV path");

  auto* fb = app.add_subcommand("fuerstenberg", "non-compactness certificate (JSON)");
  fb->add_option("--t", t);
  fb->add_option("--theta", theta);
  fb->add_option("--eta", eta);
  fb->add_option("--powers", powers, "power-iteration length for the growth probe");
  fb->add_option("--out", out_path, "output path (default: stdout)")->default_str("");

  auto* cmv = app.add_subcommand("cmv-check", "five-diagonal conjugation identity defect");
  cmv->add_option("--r", r, "constant coefficient modulus in (0,1)");
  cmv->add_option("--size", size);
  cmv->add_option("--seed", seed);
  cmv->add_option("--beta0", beta0, "free diagonal-gauge parameter");

  auto* cyc = app.add_subcommand("cyclicity", "Krylov rank checks for cyclic site pairs");
  cyc->add_option("--t", t);
  // Edge-reachability amplitudes scale like t^(window), so large windows at
  // small t sink below the numerical-rank cutoff; keep the default modest.
  cyc->add_option("--window", window)->default_val(20);
  cyc->add_option("--trials", trials);
  cyc->add_option("--seed", seed);

  auto* self = app.add_subcommand("selftest", "run the full acceptance suite");
  self->add_option("--seed", seed);

  app.require_subcommand(1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (jobs > 0) omp_set_num_threads(jobs);

  try {
    if (build->parsed())
      return cmd_build(flavor, t, size, offset, nu_spec, seed, alpha, boundary,
                       out_path);
    if (lyap->parsed())
      return cmd_lyapunov(t, nu_spec, parse_alpha_grid(alpha_grid), steps, runs,
                          seed, backward, out_path);
    if (spec->parsed())
      return cmd_spectrum(t, nu_spec, window, eps, seed, out_path);
    if (loc->parsed())
      return cmd_localize(t, nu_spec, window, realizations, eps, seed, steps,
                          runs, out_path, hist_path, bins);
    if (avg->parsed()) return cmd_average(t, nu_spec, window, grid, seed, out_path);
    if (fb->parsed())
      return cmd_fuerstenberg(t, theta, eta, powers,
                              fb->count("--out") ? out_path : std::string());
    if (cmv->parsed()) return cmd_cmv_check(r, size, seed, beta0);
    if (cyc->parsed()) return cmd_cyclicity(t, window, trials, seed);
    if (self->parsed()) return cmd_selftest(seed);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitValidation;
}
