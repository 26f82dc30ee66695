#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace softirl {

/// Deterministic counter-based random stream.
///
/// Every draw is a pure function of (stream key, draw index), and
/// child(label) derives a new stream whose key depends only on the parent
/// key and the label. Handing each parallel task its own child stream makes
/// all sampled quantities independent of scheduling and thread count.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_(mix(seed ^ kDomainSalt)) {}

  /// Stream fully determined by (this stream's base key, label); unaffected
  /// by how many draws the parent has made.
  RngStream child(std::uint64_t label) const {
    return RngStream(mix(key_ ^ mix(label + kChildSalt)), FromKey{});
  }

  std::uint64_t next_u64() { return mix(key_ + (++count_) * kGolden); }

  /// Uniform on [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1]; safe as a log() argument.
  double next_open_double() { return 1.0 - next_double(); }

  /// Draw an index from a probability row of length n (sums to 1 up to
  /// roundoff; the last index absorbs any residual mass).
  int categorical(const double* probs, int n) {
    const double u = next_double();
    double c = 0.0;
    for (int i = 0; i < n; ++i) {
      c += probs[i];
      if (u < c) return i;
    }
    return n - 1;
  }

 private:
  struct FromKey {};
  RngStream(std::uint64_t key, FromKey) : key_(key) {}

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
  static constexpr std::uint64_t kDomainSalt = 0x5f0f31625ab1cd02ull;
  static constexpr std::uint64_t kChildSalt = 0x93c467e37db0c7a4ull;

  std::uint64_t key_ = 0;
  std::uint64_t count_ = 0;
};

/// Map a uniform draw from (0, 1] to Geom(1 - gamma) on {0, 1, 2, ...} by
/// inverting the CDF: Pr(H >= k) = gamma^k. In particular a unit draw
/// u > gamma (equivalently, a [0,1) draw below 1 - gamma) yields H = 0.
inline int geometric_from_uniform(double unit_open, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("geometric_from_uniform: gamma must be in (0,1)");
  }
  const double h = std::floor(std::log(unit_open) / std::log(gamma));
  return static_cast<int>(std::min(h, 1e9));
}

/// H ~ Geom(1 - gamma): Pr(H = k) = gamma^k (1 - gamma), E[H] = gamma/(1-gamma).
inline int sample_geometric_horizon(RngStream& rng, double gamma) {
  return geometric_from_uniform(rng.next_open_double(), gamma);
}

}  // namespace softirl
