#pragma once

#include <cstdint>

namespace tfm {

// Counter-based random stream: a stateless hash of (seed, stream, counter).
// Workers can draw sample i of stream s without sharing state, so results do
// not depend on the worker count or on evaluation order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(mix(seed + 0x2545f4914f6cdd1dULL) ^ stream)) {}

  std::uint64_t bits(std::uint64_t counter) const { return mix(key_ ^ mix(counter + 1)); }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound). Modulo bias is < 2^-40 for bound < 2^24.
  std::uint64_t uniform_int(std::uint64_t counter, std::uint64_t bound) const {
    return bits(counter) % bound;
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t key_;
};

// Sequential convenience wrapper for code that just wants "the next draw".
class RngStream {
 public:
  explicit RngStream(CounterRng rng, std::uint64_t start = 0) : rng_(rng), next_(start) {}
  double uniform() { return rng_.uniform(next_++); }
  std::uint64_t bits() { return rng_.bits(next_++); }
  std::uint64_t uniform_int(std::uint64_t bound) { return rng_.uniform_int(next_++, bound); }

 private:
  CounterRng rng_;
  std::uint64_t next_;
};

}  // namespace tfm
