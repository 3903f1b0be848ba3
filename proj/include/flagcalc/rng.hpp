#pragma once

#include <cstdint>
#include <random>

namespace flagcalc {

// Identifies one reproducible random stream.  Independent trials of a
// Monte-Carlo run get consecutive stream ids over the same seed.
struct SampleSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// mt19937_64 is fully specified by the standard, so samples are
// reproducible per (seed, stream) across builds of this implementation.
inline std::mt19937_64 make_engine(SampleSeed s) {
  const std::uint64_t mixed = splitmix64(splitmix64(s.seed) ^ splitmix64(~s.stream));
  return std::mt19937_64(mixed);
}

// Uniform draw in [0, bound) by masked rejection; avoids the
// implementation-defined std::uniform_int_distribution.
inline std::uint64_t uniform_below(std::mt19937_64& eng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  std::uint64_t mask = ~0ULL;
  const int bits = 64 - __builtin_clzll(bound - 1);
  mask >>= (64 - bits);
  for (;;) {
    const std::uint64_t v = eng() & mask;
    if (v < bound) return v;
  }
}

}  // namespace flagcalc
