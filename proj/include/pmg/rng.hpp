#pragma once
#include <cstdint>

namespace pmg {

// splitmix64: tiny, seed-stable across platforms; all seeded randomness in
// the artifact (initial errors, adjoint probes, CSV reproducibility) runs
// through this so outputs are byte-identical for a given seed.
struct SplitMix64 {
  std::uint64_t s;
  explicit SplitMix64(std::uint64_t seed) : s(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform_pm1() { return 2.0 * uniform() - 1.0; }
};

}  // namespace pmg
