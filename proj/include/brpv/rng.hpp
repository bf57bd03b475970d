#pragma once

// Counter-based Philox4x32-10 streams. A stream is the pair
// (master_seed, replicate, substream); the m-th normal or uniform of a stream
// is a pure function of those coordinates and m, so replicates never share
// state and paths can be regenerated in any order.

#include <array>
#include <cstdint>

namespace brpv::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// One Philox4x32 block with 10 rounds (Salmon et al. 2011 constants).
Counter philox4x32_10(Counter ctr, Key key);

/// Maps a 64-bit word to an open-interval double in (0, 1).
inline double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

class Stream {
 public:
  Stream(std::uint64_t master_seed, std::uint64_t replicate, std::uint32_t substream = 0);

  /// Same seed and replicate, different substream; the cursor starts at 0.
  Stream substream(std::uint32_t id) const { return Stream(seed_, replicate_, id); }

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t replicate() const { return replicate_; }
  std::uint32_t substream_id() const { return substream_; }

  /// m-th standard normal of the stream (Box-Muller on block m / 2).
  double normal_at(std::uint64_t m) const;
  /// m-th uniform on (0, 1); uniforms and normals use disjoint blocks.
  double uniform_at(std::uint64_t m) const;

  double normal() { return normal_at(normal_cursor_++); }
  double uniform() { return uniform_at(uniform_cursor_++); }
  /// Standard exponential from the uniform sequence.
  double exponential();

 private:
  Counter block(std::uint64_t index, std::uint32_t domain) const;

  std::uint64_t seed_;
  std::uint64_t replicate_;
  std::uint32_t substream_;
  Key key_;
  std::uint64_t normal_cursor_ = 0;
  std::uint64_t uniform_cursor_ = 0;
};

}  // namespace brpv::rng
