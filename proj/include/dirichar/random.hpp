#pragma once

#include <cstdint>
#include <random>

namespace dirichar {

/// Seeded random stream. Every variate is generated by code in this library
/// on top of std::mt19937_64 (whose output sequence is fixed by the standard),
/// so a given seed produces the same numbers on every conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream number `stream` derived from `master` by a
  /// splitmix64 hash. Used for counter-based per-task seeding.
  static Rng derive(std::uint64_t master, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  double normal();

  /// Gamma(shape, 1). Marsaglia-Tsang acceptance without the squeeze step;
  /// shapes below one are boosted by U^(1/shape).
  double gamma(double shape);

  /// log of a Gamma(shape, 1) variate, accurate for very small shapes where
  /// the variate itself underflows.
  double log_gamma_variate(double shape);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace dirichar
