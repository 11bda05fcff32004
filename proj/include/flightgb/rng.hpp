#pragma once

// Deterministic random numbers.
//
// Engine: std::mt19937_64 seeded with one 64-bit value. The engine's output
// sequence is fixed by the C++ standard, and every derived quantity below is
// computed from the raw 64-bit outputs only, so results do not depend on the
// standard library's distribution implementations.
//
//   uniform01()  = (x >> 11) * 2^-53                      in [0, 1)
//   below(n)     = x mod n, redrawing while x >= 2^64 - (2^64 mod n)
//   normal()     = Box-Muller on (1 - uniform01(), uniform01()), cosine branch
//
// Stage seeds are derived from the master seed with
//   derive_seed(master, tag, i, j) =
//     splitmix64(splitmix64(splitmix64(master ^ fnv1a64(tag)) ^ i) ^ j)

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace flightgb {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                    std::uint64_t i = 0, std::uint64_t j = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(master ^ fnv1a64(tag)) ^ i) ^ j);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t reject_from = -(-n % n);  // 2^64 - (2^64 mod n), 0 when n divides 2^64
    for (;;) {
      const std::uint64_t x = next();
      if (reject_from == 0 || x < reject_from) return x % n;
    }
  }

  double normal() {
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Fisher-Yates from the back: for i = n-1..1 swap(i, below(i+1)).
  template <typename RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const std::uint64_t j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace flightgb
