#pragma once

#include <cstdint>
#include <random>

namespace modsurf {

// Explicit-state RNG. mt19937_64 output is fully specified by the standard,
// and the [0,1) mapping below avoids distribution objects, so streams are
// reproducible bit-for-bit across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // uniform in [0,1)
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // uniform in [-1,1]
  double uniform() { return 2.0 * unit() - 1.0; }

  // derived substream, independent of draws taken from the parent
  Rng fork(std::uint64_t stream) const {
    std::uint64_t z = seed_ + (stream + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
};

}  // namespace modsurf
