#include "brpv/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace brpv::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

// Block counters carry the block index in words 0-1 with the top bit of
// word 1 selecting normals (0) or uniforms (1).
constexpr std::uint32_t kUniformDomain = 0x80000000u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

}  // namespace

Counter philox4x32_10(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

Stream::Stream(std::uint64_t master_seed, std::uint64_t replicate, std::uint32_t substream)
    : seed_(master_seed),
      replicate_(replicate),
      substream_(substream),
      key_{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)} {
  if (replicate > 0xFFFFFFFFull) {
    throw std::out_of_range("rng::Stream: replicate index exceeds 32 bits");
  }
}

Counter Stream::block(std::uint64_t index, std::uint32_t domain) const {
  if (index >> 63) {
    throw std::out_of_range("rng::Stream: block index exhausted");
  }
  const Counter ctr{static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32) | domain, substream_,
                    static_cast<std::uint32_t>(replicate_)};
  return philox4x32_10(ctr, key_);
}

double Stream::normal_at(std::uint64_t m) const {
  const Counter c = block(m >> 1, 0u);
  const double u1 = to_unit_open((static_cast<std::uint64_t>(c[0]) << 32) | c[1]);
  const double u2 = to_unit_open((static_cast<std::uint64_t>(c[2]) << 32) | c[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return (m & 1u) ? r * std::sin(theta) : r * std::cos(theta);
}

double Stream::uniform_at(std::uint64_t m) const {
  const Counter c = block(m >> 1, kUniformDomain);
  const std::uint64_t bits = (m & 1u) ? ((static_cast<std::uint64_t>(c[2]) << 32) | c[3])
                                      : ((static_cast<std::uint64_t>(c[0]) << 32) | c[1]);
  return to_unit_open(bits);
}

double Stream::exponential() { return -std::log(uniform()); }

}  // namespace brpv::rng
