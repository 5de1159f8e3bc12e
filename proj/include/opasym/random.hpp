#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "opasym/linalg.hpp"

namespace opasym {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of instance `index` in a stream keyed by `seed`; lets sweeps run
/// instances in any order and still replay bit-for-bit.
std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t index) noexcept;

// mt19937_64 output is fixed by the standard; the floating-point conversions
// below are written out so results do not depend on the library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();
  /// Circular complex Gaussian with E|z|^2 = 1.
  Complex complex_normal();

  ComplexMatrix complex_gaussian(Index rows, Index cols);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace opasym
