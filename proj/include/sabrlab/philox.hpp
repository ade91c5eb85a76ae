#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sabr {

// Philox4x32-10 counter-based generator.  A (counter, key) pair maps to 128
// independent output bits with no carried state, so per-path / per-step
// streams need no seeding discipline beyond index bookkeeping and results do
// not depend on evaluation order.
struct Philox4x32 {
  static constexpr uint32_t kMul0 = 0xD2511F53u;
  static constexpr uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr,
                                       std::array<uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const uint64_t p0 = uint64_t(kMul0) * ctr[0];
      const uint64_t p1 = uint64_t(kMul1) * ctr[2];
      ctr = {uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], uint32_t(p1),
             uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], uint32_t(p0)};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

// Stream ids keep unrelated consumers of the same seed decorrelated.
inline constexpr uint32_t kStreamPaths = 0;
inline constexpr uint32_t kStreamBootstrap = 1;
inline constexpr uint32_t kStreamCalibration = 2;

inline std::array<uint64_t, 2> random_u64_pair(uint64_t seed, uint64_t path, uint64_t step,
                                               uint32_t stream) {
  const std::array<uint32_t, 4> ctr = {uint32_t(step), uint32_t(path),
                                       uint32_t(path >> 32), stream};
  const std::array<uint32_t, 2> key = {uint32_t(seed), uint32_t(seed >> 32)};
  const auto r = Philox4x32::block(ctr, key);
  return {(uint64_t(r[0]) << 32) | r[1], (uint64_t(r[2]) << 32) | r[3]};
}

// Two standard normals per (seed, path, step, stream) via Box-Muller on one
// Philox block; u1 is shifted into (0, 1] to keep the log finite.
inline std::array<double, 2> path_step_normals(uint64_t seed, uint64_t path, uint64_t step,
                                               uint32_t stream) {
  const auto [a, b] = random_u64_pair(seed, path, step, stream);
  const double u1 = double((a >> 11) + 1) * 0x1.0p-53;
  const double u2 = double(b >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace sabr
