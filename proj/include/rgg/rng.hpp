#pragma once

#include <array>
#include <cstdint>

namespace rgg {

using Ctr4 = std::array<std::uint32_t, 4>;
using Key2 = std::array<std::uint32_t, 2>;

/// Philox4x32-10 block function.
Ctr4 philox4x32(Ctr4 ctr, Key2 key);

/// Maps 64 random bits to a double in [0, 1) with 53 bits of precision.
inline double u01(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Stream tags keep the pair-uniform, point-sampling and auxiliary draws
/// in disjoint counter ranges under the same seed.
enum class StreamTag : std::uint32_t {
  Edge = 0x45444745u,
  Point = 0x504f4954u,
  Aux = 0x41555831u,
};

inline Key2 key_from_seed(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

/// U_ij for the unordered pair {i, j}; identical for (i, j) and (j, i).
double pair_uniform(std::uint64_t seed, std::uint32_t i, std::uint32_t j);

/// Sequential stream addressed by (seed, tag, id). Each block yields two doubles.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, StreamTag tag, std::uint64_t id);

  double uniform();
  double normal();
  std::uint64_t bits();

 private:
  void refill();

  Key2 key_;
  std::uint64_t id_;
  std::uint32_t tag_;
  std::uint32_t block_ = 0;
  Ctr4 buf_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rgg
