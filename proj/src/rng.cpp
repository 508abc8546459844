#include "bellsim/rng.hpp"

namespace bellsim {

namespace {

constexpr std::uint32_t kWeylA = 0x9E3779B9;  // golden ratio
constexpr std::uint32_t kWeylB = 0xBB67AE85;  // sqrt(3) - 1
constexpr std::uint32_t kMulA = 0xD2511F53;
constexpr std::uint32_t kMulB = 0xCD9E8D57;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t* hi,
                      std::uint32_t* lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  *hi = static_cast<std::uint32_t>(p >> 32);
  *lo = static_cast<std::uint32_t>(p);
}

inline PhiloxBlock round_once(const PhiloxBlock& c, const PhiloxKey& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mul_hi_lo(kMulA, c.v[0], &hi0, &lo0);
  mul_hi_lo(kMulB, c.v[2], &hi1, &lo1);
  PhiloxBlock r;
  r.v[0] = hi1 ^ c.v[1] ^ k.k0;
  r.v[1] = lo1;
  r.v[2] = hi0 ^ c.v[3] ^ k.k1;
  r.v[3] = lo0;
  return r;
}

}  // namespace

PhiloxBlock philox4x32_10(PhiloxBlock counter, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key.k0 += kWeylA;
      key.k1 += kWeylB;
    }
    counter = round_once(counter, key);
  }
  return counter;
}

void RngStream::refill() {
  PhiloxBlock counter;
  counter.v[0] = block_++;
  counter.v[1] = static_cast<std::uint32_t>(role_);
  counter.v[2] = static_cast<std::uint32_t>(trial_index_);
  counter.v[3] = static_cast<std::uint32_t>(trial_index_ >> 32);
  buf_ = philox4x32_10(counter, key_);
  pos_ = 0;
}

}  // namespace bellsim
