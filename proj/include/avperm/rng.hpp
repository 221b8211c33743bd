#pragma once

// Deterministic seeded randomness. Every stochastic operation takes an
// explicit Rng (or a seed it derives one from); there is no global state.
// Bounded draws use rejection on raw engine output so results depend only on
// the mt19937_64 stream, which is fully specified by the standard.

#include <cstdint>
#include <random>
#include <string_view>

#include "avperm/exact.hpp"

namespace avperm {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Independent stream derived from a seed and a label/index pair.
  static Rng stream(std::uint64_t seed, std::string_view label, std::uint64_t index = 0) {
    std::uint64_t h = seed;
    for (char c : label) h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
    return Rng(splitmix64(h ^ index));
  }

  std::uint64_t u64() { return engine_(); }

  // uniform in [0, n), n > 0
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: empty range");
    std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  // uniform bigint in [0, n)
  Int below_big(const Int& n) {
    if (n <= 0) throw std::invalid_argument("Rng::below_big: empty range");
    if (n <= std::uint64_t(~std::uint64_t{0}))
      return Int(below(n.convert_to<std::uint64_t>()));
    unsigned bits = msb(n) + 1;
    unsigned words = (bits + 63) / 64;
    while (true) {
      Int v = 0;
      for (unsigned i = 0; i < words; ++i) {
        v <<= 64;
        v += engine_();
      }
      v >>= (words * 64 - bits);  // v uniform in [0, 2^bits)
      if (v < n) return v;
    }
  }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace avperm
