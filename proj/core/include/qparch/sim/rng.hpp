#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "qparch/support/time.hpp"

namespace qparch::sim {

// Identifier recorded in trace headers; traces are only comparable across
// builds because every draw below is fully specified.
inline constexpr const char* kRngName = "mt19937_64";

// std::mt19937_64 output is pinned by the standard. Bounded draws go through
// rejection sampling here because std::uniform_int_distribution is not
// portable across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

  // Uniform in [lo, hi], inclusive.
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    if (lo >= hi) return lo;
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Uniform double in [lo, hi].
  double real_between(double lo, double hi) {
    const double unit =
        static_cast<double>(engine_() >> 11) * 0x1.0p-53;  // [0,1)
    return lo + (hi - lo) * unit;
  }

 private:
  std::mt19937_64 engine_;
};

// Derives independent, reproducible streams from one run seed: stream for a
// node or channel is keyed by its name. splitmix64 finalizer.
std::uint64_t derive_stream_seed(std::uint64_t run_seed, std::string_view key);

}  // namespace qparch::sim
