#include <doctest.h>

#include <cmath>
#include <set>

#include "brpv/rng.hpp"

using brpv::rng::Counter;
using brpv::rng::Key;
using brpv::rng::Stream;
using brpv::rng::philox4x32_10;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("unit conversion stays open") {
  CHECK(brpv::rng::to_unit_open(0) > 0.0);
  CHECK(brpv::rng::to_unit_open(~std::uint64_t{0}) < 1.0);
}

TEST_CASE("streams are pure functions of their coordinates") {
  Stream a(42, 5, 1);
  Stream b(42, 5, 1);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.normal() == b.normal());
    CHECK(a.uniform() == b.uniform());
  }
  Stream c(42, 5, 1);
  CHECK(c.normal_at(37) == Stream(42, 5, 1).normal_at(37));
  CHECK(Stream(42, 5, 1).normal_at(0) != Stream(42, 6, 1).normal_at(0));
  CHECK(Stream(42, 5, 1).normal_at(0) != Stream(42, 5, 2).normal_at(0));
  CHECK(Stream(42, 5, 1).normal_at(0) != Stream(43, 5, 1).normal_at(0));
  CHECK(c.substream(9).normal_at(3) == Stream(42, 5, 9).normal_at(3));
}

TEST_CASE("normal and uniform moments") {
  Stream s(1, 0, 0);
  const int m = 200000;
  double s1 = 0.0;
  double s2 = 0.0;
  double u1 = 0.0;
  double e1 = 0.0;
  for (int i = 0; i < m; ++i) {
    const double z = s.normal();
    s1 += z;
    s2 += z * z;
    const double u = s.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    u1 += u;
  }
  for (int i = 0; i < m; ++i) {
    e1 += s.exponential();
  }
  CHECK(std::abs(s1 / m) < 5.0 / std::sqrt(m));
  CHECK(std::abs(s2 / m - 1.0) < 5.0 * std::sqrt(2.0 / m));
  CHECK(std::abs(u1 / m - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / m));
  CHECK(std::abs(e1 / m - 1.0) < 5.0 / std::sqrt(m));
}
