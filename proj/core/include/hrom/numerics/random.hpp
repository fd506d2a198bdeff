#pragma once

#include <cstdint>
#include <random>

namespace hrom {

/// Seeded pseudo-random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distribution transforms are implemented here rather than
/// through <random> distributions, which are implementation-defined, so a
/// given seed produces the same draws with every standard library.
///
/// Single owner. Parallel workers take a `child(index)` stream each.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller (the second variate is cached).
  double normal();
  double normal(double mean, double stddev);
  /// Uniform integer on the closed range [lo, hi], without modulo bias.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  RandomStream child(std::uint64_t index) const { return RandomStream(derive_seed(seed_, index)); }

  /// splitmix64 mix of (seed, index); used for per-worker and per-epoch streams.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hrom
