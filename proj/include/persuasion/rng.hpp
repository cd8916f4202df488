#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace persuasion {

// Deterministic splitmix64 stream. All randomness in the project flows
// through this class so that results are identical across platforms and
// thread counts; substreams are derived by hashing, never by sharing.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller without caching, so the stream position is predictable.
  double normal(double mean, double sd) {
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t threshold = (0ULL - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Derives an independent substream seed from a master seed and a path of
// identifiers (e.g. {kStreamDm, dm_index}). Order-sensitive.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = detail::mix64(seed ^ 0xa0761d6478bd642fULL);
  for (std::uint64_t id : path) {
    h = detail::mix64(h ^ detail::mix64(id + 0x9e3779b97f4a7c15ULL));
  }
  return h;
}

// Stream tags used with derive_seed across the project.
enum StreamTag : std::uint64_t {
  kStreamHotel = 1,
  kStreamDm = 2,
  kStreamEpoch = 3,
  kStreamSimEpoch = 4,
  kStreamScorer = 5,
  kStreamInit = 6,
  kStreamEval = 7,
};

}  // namespace persuasion
