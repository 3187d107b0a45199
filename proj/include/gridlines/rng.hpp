#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace gridlines {

/// Counter-based generator "ctr-splitmix64/v1".
///
/// Output i of stream s under seed k is mix(key(k, s) + i * golden), where mix
/// is the SplitMix64 finalizer. Because every draw is a pure function of
/// (seed, stream, counter), replay is exact and independent of the standard
/// library's distribution implementations. Changing this function requires
/// bumping kName.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  static constexpr std::string_view kName = "ctr-splitmix64/v1";

  explicit CounterRng(std::uint64_t seed = 0, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), key_(mix(seed ^ mix(stream + kStreamSalt))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (counter_++) * kGolden); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    return uniform() < p;
  }

  /// Uniform integer in [0, bound) by rejection (unbiased).
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = max() - (max() % bound);
    for (;;) {
      const std::uint64_t x = (*this)();
      if (x < limit) return x % bound;
    }
  }

  /// Independent child stream; does not advance this generator.
  CounterRng fork(std::uint64_t sub) const {
    return CounterRng(seed_, mix(stream_ * kGolden + sub + 1));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kStreamSalt = 0x6a09e667f3bcc909ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gridlines
