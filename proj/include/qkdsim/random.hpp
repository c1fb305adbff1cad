#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace qkdsim {

// SplitMix64 finalizer; used to derive independent sub-seeds from a root seed.
std::uint64_t mix_seed(std::uint64_t root, std::uint64_t stream);

// Seeded random source. The engine is std::mt19937_64; the distributions are
// implemented here so that outcome sequences are identical across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  // Uniform on [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }
  // Uniform on [0, 1) with 53 bits of resolution.
  double unit();
  // True with probability p.
  bool chance(double p) { return p >= 1.0 || (p > 0.0 && unit() < p); }

  template <typename T>
  const T& pick(std::span<const T> items) {
    return items[below(items.size())];
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  // Child stream whose sequence depends only on (seed, stream).
  Rng split(std::uint64_t stream) const { return Rng(mix_seed(seed_, stream)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Uniformly random permutation of 0..n-1 (Fisher-Yates).
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

}  // namespace qkdsim
