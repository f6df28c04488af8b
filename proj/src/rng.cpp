#include "kex/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace kex {

namespace {

constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;
constexpr double kPoissonChunk = 500.0;

std::uint32_t poisson_inversion(Stream& s, double mean) {
  const double u = s.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint32_t k = 0;
  // The cap only matters when rounding leaves the cdf a hair below u.
  const double cap = mean + 40.0 * std::sqrt(mean) + 40.0;
  while (u >= cdf && k < cap) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t label_a, std::uint64_t label_b) noexcept {
  return mix64(mix64(mix64(base) ^ label_a) ^ (label_b * 0xd1b54a32d192ed03ULL));
}

double Stream::uniform() { return static_cast<double>(engine_() >> 11) * kTwoPowMinus53; }

double Stream::uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

std::uint32_t Stream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("poisson mean must be finite and non-negative");
  if (mean == 0.0) return 0;
  std::uint32_t total = 0;
  while (mean > kPoissonChunk) {
    total += poisson_inversion(*this, kPoissonChunk);
    mean -= kPoissonChunk;
  }
  return total + poisson_inversion(*this, mean);
}

std::size_t Stream::categorical(std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("categorical over an empty distribution");
  const double u = uniform();
  double cdf = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cdf += probs[i];
    if (u < cdf) return i;
  }
  // Rounding left the total just under 1: fall back to the last supported index.
  for (std::size_t i = probs.size(); i-- > 0;)
    if (probs[i] > 0.0) return i;
  return probs.size() - 1;
}

std::uint64_t KeyedStream::next_u64() noexcept {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double KeyedStream::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * kTwoPowMinus53; }

}  // namespace kex
