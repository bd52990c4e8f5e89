// Acceptance gate: one pass/fail line per criterion; nonzero exit if any fail.

#include <cstdint>
#include <cstdlib>
#include <iostream>

#include "uband/acceptance.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = 20260823;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);
  const auto results = uband::run_acceptance(seed, &std::cout);
  int failures = 0;
  for (const auto& r : results)
    if (!r.passed) ++failures;
  std::cout << (failures == 0 ? "ALL CRITERIA PASSED"
                              : std::to_string(failures) + " CRITERIA FAILED")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
