#pragma once

// Seeded randomness used by splits, subsampling and the synthetic
// generator. Everything here is hand-rolled so that identical seeds give
// identical bytes on every platform; std:: distributions are
// implementation-defined and would break byte-equal reproducibility.

#include <cstdint>
#include <string_view>
#include <vector>

namespace rubricgrade {

// splitmix64, the usual constants.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Unbiased draw in [0, n) via rejection.
  std::uint64_t bounded(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

inline constexpr std::uint64_t kFnv64Offset = 1469598103934665603ULL;
inline constexpr std::uint64_t kFnv64Prime = 1099511628211ULL;

inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t h = kFnv64Offset) {
  for (unsigned char c : data) {
    h ^= c;
    h *= kFnv64Prime;
  }
  return h;
}

// Derives an independent stream from a base seed and a label, so that e.g.
// the per-question shuffles of one split do not overlap.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  Rng mix(seed ^ fnv1a64(label));
  return mix.next();
}

// Fisher-Yates, deterministic given the rng state.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace rubricgrade
