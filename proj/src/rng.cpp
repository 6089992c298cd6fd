#include "rgg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rgg {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline Ctr4 round(const Ctr4& c, const Key2& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * c[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

Ctr4 philox4x32(Ctr4 ctr, Key2 key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeylA;
      key[1] += kWeylB;
    }
    ctr = round(ctr, key);
  }
  return ctr;
}

double pair_uniform(std::uint64_t seed, std::uint32_t i, std::uint32_t j) {
  const std::uint32_t a = std::min(i, j);
  const std::uint32_t b = std::max(i, j);
  const Ctr4 out = philox4x32({a, b, 0u, static_cast<std::uint32_t>(StreamTag::Edge)},
                              key_from_seed(seed));
  return u01((static_cast<std::uint64_t>(out[0]) << 32) | out[1]);
}

CounterStream::CounterStream(std::uint64_t seed, StreamTag tag, std::uint64_t id)
    : key_(key_from_seed(seed)), id_(id), tag_(static_cast<std::uint32_t>(tag)) {}

void CounterStream::refill() {
  buf_ = philox4x32({static_cast<std::uint32_t>(id_), static_cast<std::uint32_t>(id_ >> 32),
                     block_++, tag_},
                    key_);
  used_ = 0;
}

std::uint64_t CounterStream::bits() {
  if (used_ >= 4) refill();
  const std::uint64_t v = (static_cast<std::uint64_t>(buf_[used_]) << 32) | buf_[used_ + 1];
  used_ += 2;
  return v;
}

double CounterStream::uniform() { return u01(bits()); }

double CounterStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  spare_ = rad * std::sin(ang);
  has_spare_ = true;
  return rad * std::cos(ang);
}

}  // namespace rgg
