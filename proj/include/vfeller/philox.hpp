#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace vfeller {

// Philox4x32-10 (Salmon et al., SC'11). Stateless: output depends only on key and counter.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Block operator()(Block ctr) const {
    std::array<std::uint32_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k[1], static_cast<std::uint32_t>(p0)};
      k[0] += 0x9E3779B9u;
      k[1] += 0xBB67AE85u;
    }
    return ctr;
  }

  /// Standard normal pair for counter (stream, index) via Box-Muller.
  std::array<double, 2> normals(std::uint64_t stream, std::uint64_t index) const {
    const Block b = (*this)({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                             static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)});
    // 53-bit uniforms; u1 in (0, 1] keeps the log finite.
    const std::uint64_t w0 = (std::uint64_t{b[0]} << 32) | b[1];
    const std::uint64_t w1 = (std::uint64_t{b[2]} << 32) | b[3];
    const double u1 = (static_cast<double>(w0 >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(w1 >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(th), r * std::sin(th)};
  }

 private:
  std::array<std::uint32_t, 2> key_;
};

}  // namespace vfeller
