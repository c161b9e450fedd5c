#pragma once

#include <cstdint>
#include <random>

namespace pseg {

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed) noexcept;
/// Seed for sub-task `index` of a run seeded with `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept;

/// Seeded generator with platform-independent variates.
///
/// std::mt19937_64 output is fully specified by the standard, but the
/// standard distributions are not; the variates here are computed
/// explicitly so that a seed reproduces the same stream everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  int index(int n);
  /// Standard normal (Box-Muller, second variate cached).
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace pseg
