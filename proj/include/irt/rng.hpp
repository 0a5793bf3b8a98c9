#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace irt {

/// SplitMix64 finaliser. Used for seeding and for deriving substream keys.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Tags separating the substream families a single Monte Carlo run draws from.
enum class Stream : std::uint64_t {
  Imputation = 1,
  Randomization = 2,
  Dataset = 3,
  Experiment = 4,
  Method = 5,
  Replicate = 6,
};

/// xoshiro256** generator with explicit 64-bit seeding and keyed substreams.
///
/// A substream is identified by (key, family, index) and is a fresh generator
/// whose state depends only on those three numbers, so loops can be split
/// across workers without changing any draw.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept { reseed(seed); }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by Lemire's multiply-shift rejection method.
  std::uint64_t below(std::uint64_t bound) noexcept {
    auto draw = [this, bound] {
      return static_cast<unsigned __int128>((*this)()) * bound;
    };
    unsigned __int128 m = draw();
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = draw();
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  static std::uint64_t derive(std::uint64_t key, Stream family, std::uint64_t index) noexcept {
    return mix64(mix64(key ^ mix64(static_cast<std::uint64_t>(family))) + index);
  }

  static Rng substream(std::uint64_t key, Stream family, std::uint64_t index) noexcept {
    return Rng(derive(key, family, index));
  }

 private:
  void reseed(std::uint64_t seed) noexcept {
    std::uint64_t x = seed;
    for (auto& word : s_) {
      x += 0x9e3779b97f4a7c15ULL;
      word = mix64(x);
    }
  }

  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace irt
