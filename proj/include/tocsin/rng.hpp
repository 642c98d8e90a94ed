#pragma once

// Counter-based random streams.
//
// Every random draw in the toolkit is a pure function of (key, counter), so a
// draw never depends on how many other draws happened before it on another
// thread or in another process. Keys are derived from user seeds and stable
// content hashes.

#include <cstdint>
#include <string_view>

namespace tocsin::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a over the bytes, then mixed. Stable across platforms and runs.
constexpr std::uint64_t stable_hash(std::string_view bytes) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001B3ULL;
  }
  return mix64(h);
}

constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a ^ mix64(b + kGolden));
}

/// Seed for the `index`-th derived stream of `text` under `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view text,
                                    std::uint64_t index) noexcept {
  return combine(combine(mix64(seed), stable_hash(text)), index);
}

class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_{mix64(key)}, counter_{counter} {}

  // Random-access draw; does not advance the stream.
  [[nodiscard]] constexpr std::uint64_t at(std::uint64_t counter) const noexcept {
    return mix64(key_ ^ mix64(counter * kGolden));
  }

  constexpr std::uint64_t next() noexcept { return at(counter_++); }

  /// Uniform double in [0, 1) with 53 bits of resolution.
  [[nodiscard]] constexpr double uniform_at(std::uint64_t counter) const noexcept {
    return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
  }

  double uniform() noexcept { return uniform_at(counter_++); }

  /// Unbiased integer in [0, bound) (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
      if (static_cast<std::uint64_t>(m) >= threshold) {
        return static_cast<std::uint64_t>(m >> 64);
      }
    }
  }

  [[nodiscard]] constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace tocsin::rng
