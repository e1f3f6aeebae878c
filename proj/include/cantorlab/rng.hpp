#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace cantorlab {

// Small counter-style generator (splitmix64 update). Each random decision in
// a stage build gets its own stream keyed by (global seed, stage, parent key),
// so the result is independent of evaluation order and thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  Rng(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b)
      : state_(mix(mix(mix(0x9E3779B97F4A7C15ull ^ seed) + stream_a) + stream_b)) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // Uniform in [0, bound). Multiply-shift reduction; the modulo bias is
  // O(bound/2^64) and irrelevant at the bounds used here (< 2^32).
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  // Uniform in [0,1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Draw k distinct values from {lo, lo+1, ..., hi} via partial Fisher-Yates,
  // returned sorted. Requires k <= hi - lo + 1.
  std::vector<std::int64_t> sample_without_replacement(std::int64_t lo,
                                                       std::int64_t hi,
                                                       std::size_t k) {
    std::vector<std::int64_t> pool;
    pool.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t v = lo; v <= hi; ++v) pool.push_back(v);
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + static_cast<std::size_t>(next_below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace cantorlab
