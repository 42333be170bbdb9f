#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace socnet {

/// One step of the splitmix64 generator. Advances `state` and returns the
/// mixed output.
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of the `index`-th child stream: the (index+1)-th splitmix64 output
/// of a generator started at `seed`. Child seeds are therefore computable
/// individually, without generating the preceding ones.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t state = seed + index * 0x9e3779b97f4a7c15ULL;
  return splitmix64(state);
}

/// Seeded generator with platform-independent sampling helpers.
///
/// mt19937_64's output sequence is fixed by the standard, but the standard
/// distributions are not; everything derived from the raw stream is done
/// here so that a seed reproduces the same numbers with any toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t below(std::uint64_t bound) {
    // Lemire's multiply-shift with rejection of the biased low zone.
    __extension__ typedef unsigned __int128 u128;
    u128 m = static_cast<u128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<u128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1].
  double uniform_open_low() { return 1.0 - uniform(); }

  bool coin() { return (next() >> 63) != 0; }

  /// Standard normal deviate (Box-Muller, one value per call).
  double normal() {
    const double radius = std::sqrt(-2.0 * std::log(uniform_open_low()));
    return radius * std::cos(2.0 * std::numbers::pi * uniform());
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace socnet
