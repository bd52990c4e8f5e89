#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace uband {

/// One gate of the acceptance suite.
struct CriterionResult {
  int index = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured values vs pinned thresholds
  double seconds = 0.0;
};

CriterionResult criterion_exact_identities(std::uint64_t seed);
CriterionResult criterion_group_certificate(std::uint64_t seed);
CriterionResult criterion_lyapunov_calibration(std::uint64_t seed);
CriterionResult criterion_positivity_sweep(std::uint64_t seed);
CriterionResult criterion_localization_evidence(std::uint64_t seed);
CriterionResult criterion_spectrum_containment(std::uint64_t seed);
CriterionResult criterion_spectral_averaging(std::uint64_t seed);
CriterionResult criterion_cyclicity_rank(std::uint64_t seed);

/// Runs all eight criteria in order, streaming one line per criterion to
/// `log` (if non-null). Returns the individual results.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed,
                                            std::ostream* log);

}  // namespace uband
