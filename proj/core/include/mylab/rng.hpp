#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace mylab {

/// Philox4x32-10 block function (Salmon et al.), exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based random stream. The key is the seed; the 128-bit counter is
/// (position, stream_id), so distinct stream ids never share counter blocks
/// and a (seed, stream_id) pair replays the same sequence bit for bit.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Child stream identified by `tag`; deterministic in (stream_id, tag).
  RngStream derive(std::uint64_t tag) const;

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller, pairs cached).
  double normal();
  void fill_normal(std::span<double> out);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t position_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace mylab
