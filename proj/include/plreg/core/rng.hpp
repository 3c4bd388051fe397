#pragma once

#include <cstdint>

namespace plreg {

// Counter-based generator: every draw is a pure hash of (seed, stream, counter),
// so runs are reproducible across platforms and independent of call order
// between streams.  The mix is the splitmix64 finalizer applied to the
// concatenated state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64() { return mix(seed_, stream_, counter_++); }

  // uniform in [0,1) with 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // index in [0, n)
  std::uint64_t index(std::uint64_t n) { return next_u64() % n; }

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t counter) {
    std::uint64_t z = seed;
    z = splitmix(z + 0x9e3779b97f4a7c15ULL * (stream + 1));
    z = splitmix(z + 0x9e3779b97f4a7c15ULL * (counter + 1));
    return z;
  }

 private:
  static std::uint64_t splitmix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace plreg
