#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace splitres {

// Seeded generator with explicitly defined derived distributions, so that
// sequences are reproducible independent of the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return static_cast<std::size_t>(v % bound);
  }

  template <typename Range>
  void shuffle(Range& r) {
    for (std::size_t i = r.size(); i > 1; --i) {
      std::size_t j = below(i);
      using std::swap;
      swap(r[i - 1], r[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace splitres
