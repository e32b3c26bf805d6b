#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "risopt/types.hpp"

namespace risopt {

// Seedable random stream. All sampling in the library goes through this
// type so a fixed seed reproduces every draw bit for bit.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform();
  // Uniform on (0, 2*pi].
  double angle();
  // Standard normal.
  double normal();
  // Exponential with unit rate.
  double exponential();
  // Circularly-symmetric CN(0, variance): real and imaginary parts each
  // carry variance / 2.
  Complex complex_normal(double variance = 1.0);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::exponential_distribution<double> exponential_{1.0};
};

// Derives an independent sub-stream from a master seed, a purpose name and
// up to two indices. Adding a new purpose never perturbs existing streams.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view purpose,
                          std::uint64_t index = 0, std::uint64_t sub_index = 0);

inline RandomStream derive_stream(std::uint64_t master_seed, std::string_view purpose,
                                  std::uint64_t index = 0, std::uint64_t sub_index = 0) {
  return RandomStream(derive_seed(master_seed, purpose, index, sub_index));
}

}  // namespace risopt
