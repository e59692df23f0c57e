#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace copula {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seeded random stream.  The engine (mt19937_64) and every transform below
/// are fully pinned, so a seed reproduces the same sample stream run after
/// run; std::shuffle / std::*_distribution are avoided on purpose since the
/// standard leaves their output unspecified.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Unbiased integer in [0, bound) by masked rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound < 2) return 0;
    std::uint64_t mask = ~std::uint64_t{0} >> __builtin_clzll(bound - 1);
    for (;;) {
      std::uint64_t r = next_u64() & mask;
      if (r < bound) return r;
    }
  }

  /// Standard normal via Box-Muller (pair cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Derive the seed of an indexed child stream.  Every sampled replica gets
/// its own substream, so ensembles are reproducible independently of thread
/// count or scheduling.
inline std::uint64_t substream_seed(std::uint64_t root, std::uint64_t id) {
  std::uint64_t st = root ^ (0x9e3779b97f4a7c15ULL * (id + 0x632be59bd9b4e019ULL));
  std::uint64_t s = splitmix64(st);
  return s ^ splitmix64(st);
}

inline Rng substream(std::uint64_t root, std::uint64_t id) {
  return Rng(substream_seed(root, id));
}

/// Named substream for per-module streams hanging off one root seed.
inline Rng substream(std::uint64_t root, std::string_view name, std::uint64_t id = 0) {
  return Rng(substream_seed(root ^ fnv1a64(name), id));
}

}  // namespace copula
