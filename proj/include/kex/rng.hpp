#pragma once

#include <concepts>
#include <cstdint>
#include <random>
#include <span>

namespace kex {

/// Anything that yields uniform doubles in [0, 1).
template <class R>
concept UniformSource = requires(R& r) {
  { r.uniform() } -> std::convertible_to<double>;
};

/// splitmix64 finalizer; used for seed derivation and keyed draws.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent child seed from a base seed and up to two labels.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t label_a, std::uint64_t label_b = 0) noexcept;

/// Seeded random stream. The engine is std::mt19937_64, whose output sequence
/// is fixed by the standard; every distribution is computed here explicitly
/// because the <random> distributions are implementation-defined.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// 53-bit uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  bool bernoulli(double p) { return uniform() < p; }

  /// Poisson draw by sequential inversion. Means above 500 are split into
  /// chunks so exp(-mean) never underflows.
  std::uint32_t poisson(double mean);

  /// Index drawn by inversion of a probability vector.
  std::size_t categorical(std::span<const double> probs);

 private:
  std::mt19937_64 engine_;
};

/// Counter-style generator: a splitmix64 sequence started from a key. Cheap to
/// construct, so one can be created per (donor, patient) encounter.
class KeyedStream {
 public:
  explicit KeyedStream(std::uint64_t key) noexcept : state_(key) {}

  std::uint64_t next_u64() noexcept;
  double uniform() noexcept;

 private:
  std::uint64_t state_;
};

}  // namespace kex
