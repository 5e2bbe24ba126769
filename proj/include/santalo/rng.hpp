#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace santalo {

/// Counter-based random stream: every draw is a pure function of
/// (seed, stream, index), so results do not depend on evaluation order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t bits(std::uint64_t index) const { return mix(key_ ^ mix(index)); }

  /// Uniform in [0, 1).
  double uniform(std::uint64_t index) const {
    return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t index, double lo, double hi) const {
    return lo + (hi - lo) * uniform(index);
  }

  /// Standard normal via Box-Muller on two sub-counters.
  double normal(std::uint64_t index) const {
    const double u1 = 1.0 - uniform(2 * index);
    const double u2 = uniform(2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Derive an independent stream, e.g. one per fuzz case.
  CounterRng substream(std::uint64_t id) const {
    CounterRng r(0);
    r.key_ = mix(key_ + mix(id ^ 0xd1b54a32d192ed03ULL));
    return r;
  }

 private:
  std::uint64_t key_;
};

/// Sequential convenience wrapper over a counter stream.
class RngCursor {
 public:
  explicit RngCursor(CounterRng rng) : rng_(rng) {}
  double uniform() { return rng_.uniform(next_++); }
  double uniform(double lo, double hi) { return rng_.uniform(next_++, lo, hi); }
  double normal() { return rng_.normal(next_++); }
  std::uint64_t bits() { return rng_.bits(next_++); }

 private:
  CounterRng rng_;
  std::uint64_t next_ = 0;
};

}  // namespace santalo
