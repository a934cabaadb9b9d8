#pragma once

#include <cstdint>

#include "landr/core.hpp"

namespace landr {

/// SplitMix64. Small, fast, and splittable: split() derives an independent
/// stream, so each right-hand side can get its own reproducible generator.
/// Normal deviates come from Box–Muller, which keeps the stream identical on
/// every platform (std::normal_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal();

  Rng split() { return Rng(next_u64() ^ 0x6a09e667f3bcc909ULL); }

  /// Independent N(0,1) entries; complex entries have unit variance overall.
  template <Scalar S>
  Vector<S> normal_vector(std::size_t n);

 private:
  std::uint64_t state_;
  double spare_ = 0;
  bool has_spare_ = false;
};

}  // namespace landr
