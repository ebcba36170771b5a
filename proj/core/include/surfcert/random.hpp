#pragma once

#include <cstdint>
#include <random>

namespace surfcert {

// mt19937_64 has a fully specified output sequence, so seeded runs are
// reproducible across standard libraries as long as we avoid the
// implementation-defined std::uniform_int_distribution.
using Rng = std::mt19937_64;

// Uniform draw from [0, bound). bound must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed for stream (a, b) of a master seed; independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0x2545f4914f6cdd1dULL));
}

template <typename Container>
void shuffle(Container& c, Rng& rng) {
  for (std::size_t i = c.size(); i > 1; --i) {
    std::size_t j = uniform_below(rng, i);
    using std::swap;
    swap(c[i - 1], c[j]);
  }
}

}  // namespace surfcert
