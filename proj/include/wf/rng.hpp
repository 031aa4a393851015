#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace wf {

// Philox4x32-10 counter-based generator. Every draw is a pure function of
// (seed, stream_id, counter), so independent streams can be addressed
// directly without sharing state.
class Philox {
 public:
  using Block = std::array<std::uint32_t, 4>;

  Philox(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream_id) {}

  Block operator()(std::uint64_t counter) const noexcept {
    Block ctr{static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
              static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
};

// Sequential view over one Philox stream. Block k yields two 64-bit words;
// Gaussian draws use Box-Muller on that pair, so normals 2k and 2k+1 come
// from block k.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept : gen_(seed, stream_id) {}

  // Uniform on (0, 1].
  double uniform() noexcept {
    const auto b = gen_(counter_++);
    return to_open_unit(join(b[0], b[1]));
  }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const auto b = gen_(counter_++);
    const double u1 = to_open_unit(join(b[0], b[1]));
    const double u2 = to_half_open_unit(join(b[2], b[3]));
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // +1 or -1 with equal probability.
  double sign() noexcept {
    if (bits_left_ == 0) {
      const auto b = gen_(counter_++);
      bits_ = join(b[0], b[1]);
      bits_left_ = 64;
    }
    const double s = (bits_ & 1u) ? 1.0 : -1.0;
    bits_ >>= 1;
    --bits_left_;
    return s;
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  static std::uint64_t join(std::uint32_t lo, std::uint32_t hi) noexcept {
    return (std::uint64_t{hi} << 32) | lo;
  }
  static double to_open_unit(std::uint64_t w) noexcept {
    return (static_cast<double>(w >> 11) + 1.0) * 0x1.0p-53;
  }
  static double to_half_open_unit(std::uint64_t w) noexcept {
    return static_cast<double>(w >> 11) * 0x1.0p-53;
  }

  Philox gen_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
  std::uint64_t bits_ = 0;
  int bits_left_ = 0;
};

// Stream identifiers used across the library. Per-trial or per-index streams
// are derived as base + index.
namespace streams {
inline constexpr std::uint64_t kDesign = 1;
inline constexpr std::uint64_t kInit = 2;
inline constexpr std::uint64_t kSignal = 3;
inline constexpr std::uint64_t kSignFlips = 4;
inline constexpr std::uint64_t kLooIndices = 5;
inline constexpr std::uint64_t kProbe = 6;
inline constexpr std::uint64_t kTrialBase = 1u << 20;
}  // namespace streams

}  // namespace wf
