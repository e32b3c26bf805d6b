#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace risopt {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Fast randomized invariant checks over the whole library: stacking
// identity, steering vector modulus, gradient vs. finite differences,
// surrogate majorization and per-step descent, unit modulus of outputs.
std::vector<SelftestCheck> run_selftest(std::uint64_t seed);

}  // namespace risopt
