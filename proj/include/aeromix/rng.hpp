#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace aeromix {

// Deterministic 64-bit generator (splitmix64). <random> distributions are
// implementation-defined, so all draws needed for reproducible artifacts go
// through this class instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform();

  // Standard normal via the polar (Marsaglia) method.
  double normal();

  // Uniform integer in [0, n); rejection sampling, n > 0.
  std::uint64_t bounded(std::uint64_t n);

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stable stream derivation: independent consumers of one master seed get
// decorrelated substreams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

}  // namespace aeromix
