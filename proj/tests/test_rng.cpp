#include "doctest.h"

#include <cstdint>
#include <set>
#include <vector>

#include "bellsim/rng.hpp"

using namespace bellsim;

namespace {

bool block_equals(const PhiloxBlock& b, std::uint32_t w0, std::uint32_t w1,
                  std::uint32_t w2, std::uint32_t w3) {
  return b.v[0] == w0 && b.v[1] == w1 && b.v[2] == w2 && b.v[3] == w3;
}

}  // namespace

TEST_SUITE("rng") {

// Reference vectors published with the original counter-based-RNG test kit
// (kat_vectors for philox4x32-10).
TEST_CASE("philox4x32-10 known-answer vectors") {
  SUBCASE("all-zero counter and key") {
    const PhiloxBlock out = philox4x32_10(PhiloxBlock{{0, 0, 0, 0}}, PhiloxKey{0, 0});
    CHECK(block_equals(out, 0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u));
  }
  SUBCASE("all-ones counter and key") {
    const PhiloxBlock out = philox4x32_10(
        PhiloxBlock{{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}},
        PhiloxKey{0xffffffffu, 0xffffffffu});
    CHECK(block_equals(out, 0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu));
  }
  SUBCASE("pi-digit counter and key") {
    const PhiloxBlock out = philox4x32_10(
        PhiloxBlock{{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}},
        PhiloxKey{0xa4093822u, 0x299f31d0u});
    CHECK(block_equals(out, 0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u));
  }
}

TEST_CASE("philox is a pure function of counter and key") {
  const PhiloxBlock c{{1u, 2u, 3u, 4u}};
  const PhiloxKey k{5u, 6u};
  const PhiloxBlock a = philox4x32_10(c, k);
  const PhiloxBlock b = philox4x32_10(c, k);
  CHECK(block_equals(b, a.v[0], a.v[1], a.v[2], a.v[3]));
  // Any single-word change to the counter changes the output.
  for (int w = 0; w < 4; ++w) {
    PhiloxBlock c2 = c;
    c2.v[w] ^= 1u;
    const PhiloxBlock d = philox4x32_10(c2, k);
    CHECK_FALSE(block_equals(d, a.v[0], a.v[1], a.v[2], a.v[3]));
  }
}

TEST_CASE("streams replay exactly for equal (seed, index, role)") {
  RngStream s1(42, 7, StreamRole::source);
  RngStream s2(42, 7, StreamRole::source);
  for (int i = 0; i < 100; ++i) CHECK(s1.next_u32() == s2.next_u32());
}

TEST_CASE("streams differ across seed, trial index and role") {
  auto first_words = [](std::uint64_t seed, std::uint64_t index, StreamRole role) {
    RngStream s(seed, index, role);
    std::vector<std::uint32_t> w;
    for (int i = 0; i < 8; ++i) w.push_back(s.next_u32());
    return w;
  };
  const auto base = first_words(1, 0, StreamRole::source);
  CHECK(base != first_words(2, 0, StreamRole::source));
  CHECK(base != first_words(1, 1, StreamRole::source));
  CHECK(base != first_words(1, 0, StreamRole::setting_draw));
  CHECK(base != first_words(1, 0, StreamRole::measurement_noise));
  // High seed bits land in the key too.
  CHECK(base != first_words(1ull << 32 | 1ull, 0, StreamRole::source));
  // High index bits land in the counter.
  CHECK(first_words(1, 5, StreamRole::source) !=
        first_words(1, 5ull + (1ull << 32), StreamRole::source));
}

TEST_CASE("consuming one role leaves the other roles' draws unchanged") {
  RngStream noisy(9, 3, StreamRole::source);
  for (int i = 0; i < 57; ++i) noisy.next_u32();  // burn an odd number
  RngStream settings_a(9, 3, StreamRole::setting_draw);
  RngStream settings_b(9, 3, StreamRole::setting_draw);
  for (int i = 0; i < 16; ++i) CHECK(settings_a.next_u32() == settings_b.next_u32());
}

TEST_CASE("next_u64 is two consecutive u32 draws, low word first") {
  RngStream a(123, 456, StreamRole::source);
  RngStream b(123, 456, StreamRole::source);
  const std::uint64_t v = a.next_u64();
  const std::uint32_t lo = b.next_u32();
  const std::uint32_t hi = b.next_u32();
  CHECK(v == (static_cast<std::uint64_t>(hi) << 32 | lo));
}

TEST_CASE("next_unit lies in [0,1) with a plausible mean") {
  RngStream s(2026, 0, StreamRole::source);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = s.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  const double mean = sum / n;
  // sd of the mean is ~0.0009; allow 5 sigma.
  CHECK(mean > 0.5 - 0.0046);
  CHECK(mean < 0.5 + 0.0046);
}

TEST_CASE("next_coin is a fair bit") {
  RngStream s(7, 11, StreamRole::setting_draw);
  int heads = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) heads += s.next_coin();
  // 5 sigma around n/2 with sigma = sqrt(n)/2 ~ 158.
  CHECK(heads > n / 2 - 800);
  CHECK(heads < n / 2 + 800);
}

TEST_CASE("long streams do not repeat their first block") {
  RngStream s(31337, 2, StreamRole::source);
  std::set<std::uint32_t> seen;
  int collisions = 0;
  for (int i = 0; i < 4096; ++i) {
    if (!seen.insert(s.next_u32()).second) ++collisions;
  }
  // Birthday bound: ~2 collisions expected among 4096 32-bit draws.
  CHECK(collisions < 10);
}

}  // TEST_SUITE
