#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace specrob {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream seed for (seed, i, j, ...). Streams depend only on the
// indices, never on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> indices) {
  std::uint64_t h = splitmix64(seed);
  for (auto i : indices) h = splitmix64(h ^ splitmix64(i + 0x632BE59BD9B4E019ULL));
  return h;
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed,
                    std::initializer_list<std::uint64_t> indices = {}) {
  return Rng(derive_seed(seed, indices));
}

}  // namespace specrob
