#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

namespace resavg {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// Pure function of (key, counter): streams for different seeds, steps and
/// processes are addressed directly instead of consumed in sequence, so
/// results do not depend on evaluation order or thread count.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

/// Gaussian increments addressed by (seed, step, process).
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  /// Independent standard normal pair (Box-Muller on one Philox block).
  std::pair<double, double> normal_pair(std::uint64_t step, std::uint32_t process) const {
    const auto block = Philox4x32::generate(
        {static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), process, 0u}, key_);
    const double u1 = to_unit(block[0], block[1]);
    const double u2 = to_unit(block[2], block[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925 * u2;
    return {r * std::cos(angle), r * std::sin(angle)};
  }

 private:
  // uniform in (0, 1) from 53 random bits
  static double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
};

}  // namespace resavg
