#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace tactile {

// Derives an independent sub-seed from (seed, stream) with splitmix64.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded random source with platform-independent distributions.
///
/// The standard library leaves the output of its distributions
/// implementation-defined, so everything above the raw mt19937_64 engine is
/// computed here. Datasets and trained models are therefore reproducible
/// bit-for-bit across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform index in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  /// Uniform integer in [lo, hi], inclusive.
  int integer(int lo, int hi);

  double normal(double mean = 0.0, double stddev = 1.0);

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tactile
