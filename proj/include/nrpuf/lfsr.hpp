#pragma once

#include <cstdint>

namespace nrpuf {

/// 64-bit Fibonacci LFSR for x^64 + x^63 + x^61 + x^60 + 1 (maximal length).
/// The register shifts right; the feedback bit enters at bit 63.
class Lfsr64 {
 public:
  /// The all-zero state is a fixed point and is replaced by this constant.
  static constexpr std::uint64_t kZeroSubstitute = 0x9E3779B97F4A7C15ULL;

  constexpr explicit Lfsr64(std::uint64_t seed) noexcept
      : state_(seed == 0 ? kZeroSubstitute : seed) {}

  constexpr std::uint64_t state() const noexcept { return state_; }

  constexpr void step() noexcept {
    const std::uint64_t bit = (state_ ^ (state_ >> 1) ^ (state_ >> 3) ^ (state_ >> 4)) & 1u;
    state_ = (state_ >> 1) | (bit << 63);
  }

  /// Advances 64 steps and returns the new state: 64 freshly generated bits,
  /// the earliest in bit 0.
  constexpr std::uint64_t next_word() noexcept {
    advance_block(60);
    advance_block(4);
    return state_;
  }

 private:
  // Feedback taps reach at most 4 positions ahead, so up to 60 steps can be
  // produced from one snapshot of the register.
  constexpr void advance_block(unsigned n) noexcept {
    const std::uint64_t fresh = state_ ^ (state_ >> 1) ^ (state_ >> 3) ^ (state_ >> 4);
    const std::uint64_t mask = (n == 64) ? ~0ULL : ((1ULL << n) - 1);
    state_ = (state_ >> n) | ((fresh & mask) << (64 - n));
  }

  std::uint64_t state_;
};

}  // namespace nrpuf
