#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace nrpuf {

/// SplitMix64 finalizer. Used to turn structured keys into well-mixed seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives a child seed from a parent seed and an ordered list of integer
/// keys. The mapping is a pure function of its arguments, so any worker can
/// reconstruct the stream for (instance, challenge, trial) without shared
/// state.
inline std::uint64_t derive_seed(std::uint64_t parent,
                                 std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = mix64(parent ^ 0x6A09E667F3BCC909ULL);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0xD1B54A32D192ED03ULL));
  return h;
}

/// Stream tags, so that streams derived for different purposes never alias.
enum class StreamTag : std::uint64_t {
  instance = 1,
  array_a,
  array_b,
  array_dummy,
  comparator_a,
  comparator_b,
  evaluation,
  challenges,
  reference,
  sac,
  dummy,
  power_noise,
};

inline std::uint64_t derive_seed(std::uint64_t parent, StreamTag tag,
                                 std::initializer_list<std::uint64_t> keys = {}) noexcept {
  std::uint64_t h = derive_seed(parent, {static_cast<std::uint64_t>(tag)});
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0xD1B54A32D192ED03ULL));
  return h;
}

/// xoshiro256** seeded through SplitMix64. Satisfies
/// UniformRandomBitGenerator, so it plugs into <random> distributions.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed = 0) noexcept { reseed(seed); }

  void reseed(std::uint64_t seed) noexcept {
    std::uint64_t z = seed;
    for (auto& word : s_) {
      z += 0x9E3779B97F4A7C15ULL;
      word = mix64(z - 0x9E3779B97F4A7C15ULL);
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

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

  /// Child stream seeded from the next output. Draw children before any
  /// data-dependent consumption if their contents must stay aligned.
  Stream split() noexcept { return Stream(mix64((*this)())); }

  /// Uniform double in [0, 1).
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept {
    // Lemire's nearly-divisionless method.
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool coin() noexcept { return ((*this)() >> 63) != 0; }

  friend bool operator==(const Stream&, const Stream&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace nrpuf
