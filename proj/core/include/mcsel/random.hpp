#pragma once

#include <cstdint>

namespace mcsel {

/// Seeded 64-bit generator (SplitMix64 counter walk).
///
/// Streams are derived, never shared: `split(i)` hashes the construction seed
/// together with `i`, so the child sequence depends only on (seed, i) and not
/// on how many variates the parent has produced.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) noexcept;

  /// Independent stream for replication/task `task_index` under `master_seed`.
  static RandomStream for_task(std::uint64_t master_seed, std::uint64_t task_index) noexcept;

  RandomStream split(std::uint64_t index) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1).
  double uniform_open() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Standard normal via the Box-Muller transform; the second variate of each
  /// pair is cached.
  double normal() noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

}  // namespace mcsel
