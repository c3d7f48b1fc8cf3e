// Seeded random streams with platform-stable draws.
//
// std::uniform_int_distribution and std::shuffle are implementation-defined,
// so reproducible pipelines roll their own draws on top of mt19937_64. The
// substream construction keys a stream on (seed, index); parallel workers that
// each own one substream reproduce the sequential output exactly.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace treeaug {

using RandomStream = std::mt19937_64;

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t seed, uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

inline RandomStream substream(uint64_t seed, uint64_t index) {
  return RandomStream(mix_seed(seed, index));
}

// Unbiased draw from [0, bound) via rejection. bound must be nonzero.
inline uint64_t uniform_below(RandomStream& g, uint64_t bound) {
  const uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const uint64_t r = g();
    if (r >= threshold) return r % bound;
  }
}

// 53-bit uniform in [0, 1).
inline double uniform_unit(RandomStream& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(RandomStream& g, double p) { return uniform_unit(g) < p; }

inline double uniform_real(RandomStream& g, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(g);
}

// Fisher-Yates; same sequence on every platform, unlike std::shuffle.
template <typename T>
void shuffle(std::vector<T>& v, RandomStream& g) {
  for (size_t i = v.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(uniform_below(g, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace treeaug
