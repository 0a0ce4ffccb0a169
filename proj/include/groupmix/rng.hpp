#pragma once

#include <cstdint>
#include <vector>

namespace groupmix {

// Counter-based splittable generator. A stream is addressed by
// (seed, stream, counter); the state is a pure function of the address, so
// sample i of experiment e always sees the same randomness no matter how work
// is scheduled across threads. The underlying mix is SplitMix64.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter)
      : state_(derive(seed, stream, counter)) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Unbiased integer in [0, n) via Lemire's multiply-shift rejection.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t x = next_u64();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<unsigned __int128>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Index into a discrete distribution given cumulative weights
  // (cum.back() == total mass). Fixed inverse-CDF walk, portable across
  // standard libraries; do not replace with std::discrete_distribution.
  std::size_t pick_cumulative(const std::vector<double>& cum) {
    const double x = u01() * cum.back();
    std::size_t lo = 0;
    while (lo + 1 < cum.size() && cum[lo] <= x) ++lo;
    return lo;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t counter) {
    std::uint64_t h = mix(seed + 0x9E3779B97F4A7C15ULL);
    h = mix(h ^ (stream + 0xD1B54A32D192ED03ULL));
    h = mix(h ^ (counter + 0x8CB92BA72F3D8DD7ULL));
    return h;
  }

  std::uint64_t state_;
};

}  // namespace groupmix
