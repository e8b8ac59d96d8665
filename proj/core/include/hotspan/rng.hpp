#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace hotspan {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/**
  Deterministic seed derivation for the master -> trial -> episode hierarchy.
  Every random draw in the pipeline descends from a single master seed through
  chained derive_seed calls, so any sub-run can be reproduced in isolation.
*/
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return detail::splitmix64(base ^ detail::splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/**
  Seeded generator with the handful of draws the simulator needs.
  All draws are built on the raw 64-bit stream, not on std:: distribution
  objects, so a given seed produces the same sequence on every platform.
*/
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exponential with the given rate (mean 1/rate).
  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [0, n), rejection sampled to avoid modulo bias.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// k distinct entries drawn uniformly from pool, in pool order of selection.
template <typename T>
std::vector<T> sample_without_replacement(const std::vector<T>& pool, std::size_t k, Rng& rng) {
  if (k > pool.size()) throw std::invalid_argument("sample_without_replacement: k exceeds pool size");
  std::vector<T> scratch(pool);
  std::vector<T> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(scratch.size() - i));
    std::swap(scratch[i], scratch[j]);
    out.push_back(scratch[i]);
  }
  return out;
}

}  // namespace hotspan
