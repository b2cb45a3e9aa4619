#pragma once

#include <cmath>
#include <cstdint>

#include "atba/error.hpp"

namespace atba {

// Deterministic 64-bit generator (splitmix64, Steele et al. finalizer
// constants). All randomness in the library flows through this type: the
// <random> distributions are avoided because their outputs are
// implementation-defined, which would break the reproducibility contract of
// the synthetic corpus.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive integer range. Modulo mapping keeps the draw portable; the bias
  // is below 2^-50 for every range used here.
  int uniform_int(int lo, int hi) {
    if (hi < lo) fail(ErrorKind::Validation, "uniform_int: empty range");
    const std::uint64_t span =
        static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - static_cast<std::int64_t>(lo) + 1);
    return lo + static_cast<int>(next() % span);
  }

  // Standard normal via the Box-Muller transform; no cached second value so
  // the stream position is a pure function of the number of calls.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    constexpr double two_pi = 6.283185307179586476925287;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  double exponential() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return -std::log(u);
  }

 private:
  std::uint64_t state_;
};

// Independent stream keyed by (seed, index). Both inputs are avalanched so
// adjacent seeds or indices do not yield correlated streams.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 a(seed);
  SplitMix64 b(index ^ 0x6C62272E07BB0142ull);
  return SplitMix64(a.next() ^ b.next());
}

}  // namespace atba
