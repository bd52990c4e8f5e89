// Benchmark: OpenMP growth-rate estimator vs the serial reference.
// Also asserts that both produce bitwise-identical results.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>

#include "uband/disorder.hpp"
#include "uband/operator_core.hpp"
#include "uband/transfer.hpp"

int main(int argc, char** argv) {
  using namespace uband;
  LyapunovOptions opts;
  opts.steps = argc > 1 ? std::strtoll(argv[1], nullptr, 10) : 200000;
  opts.runs = argc > 2 ? std::strtoll(argv[2], nullptr, 10) : 16;
  const BandParameters p = BandParameters::from_t(0.5);
  const PhaseDistribution nu = PhaseDistribution::uniform();
  const std::uint64_t seed = 42;

  const auto t0 = std::chrono::steady_clock::now();
  const LyapunovPair par = estimate_lyapunov(nu, p, 0.3, opts, seed);
  const auto t1 = std::chrono::steady_clock::now();
  const LyapunovPair ser = estimate_lyapunov_serial(nu, p, 0.3, opts, seed);
  const auto t2 = std::chrono::steady_clock::now();

  const double dt_par = std::chrono::duration<double>(t1 - t0).count();
  const double dt_ser = std::chrono::duration<double>(t2 - t1).count();
  std::printf("steps %lld  runs %lld\n",
              static_cast<long long>(opts.steps),
              static_cast<long long>(opts.runs));
  std::printf("parallel: gamma %.17g  stderr %.3g  %.3f s\n",
              par.forward.gamma_hat, par.forward.std_error, dt_par);
  std::printf("serial:   gamma %.17g  stderr %.3g  %.3f s\n",
              ser.forward.gamma_hat, ser.forward.std_error, dt_ser);
  std::printf("speedup: %.2fx\n", dt_ser / dt_par);

  const bool identical = par.forward.gamma_hat == ser.forward.gamma_hat &&
                         par.backward.gamma_hat == ser.backward.gamma_hat &&
                         par.forward.std_error == ser.forward.std_error;
  std::printf("bitwise identical: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
