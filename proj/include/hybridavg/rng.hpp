#ifndef HYBRIDAVG_RNG_HPP
#define HYBRIDAVG_RNG_HPP

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace hybridavg {

/// splitmix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z);

/// Seed for the stream addressed by `path` under `master`, e.g.
/// stream_seed(master, {epsilon_index, replication}). Distinct paths give
/// statistically independent streams.
std::uint64_t stream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// xoshiro256** seeded through splitmix64. Satisfies UniformRandomBitGenerator.
/// Variates are produced by hand so that streams are identical across
/// standard library implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Exp(1) by inversion; strictly positive and finite.
  double exponential();

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace hybridavg

#endif  // HYBRIDAVG_RNG_HPP
