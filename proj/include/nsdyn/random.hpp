#pragma once

#include <cstdint>

namespace nsdyn {

// Counter-based randomness. Every random quantity in the library is a pure
// function of (master seed, index), so results never depend on evaluation
// order or thread schedule.

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of run `index` derived from a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(master ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Key for the random draw attached to a signed coordinate.
constexpr std::uint64_t coordinate_key(std::uint64_t seed, std::int64_t coord) noexcept {
  return mix64(seed ^ mix64(static_cast<std::uint64_t>(coord)));
}

/// Uniform double in [0, 1) from 64 random bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Stream of uniforms keyed by a single 64-bit key.
class CounterStream {
 public:
  explicit constexpr CounterStream(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t next_bits() noexcept { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }
  constexpr double next() noexcept { return to_unit(next_bits()); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Poisson(mean) draw: inversion by summation for small means, transformed
/// rejection (PTRS) otherwise.
int sample_poisson(double mean, CounterStream& stream);

}  // namespace nsdyn
