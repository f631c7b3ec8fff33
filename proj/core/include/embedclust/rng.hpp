#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace embedclust {

// Derives an independent sub-seed from a master seed and a stream label.
// Adding a new labeled stream never perturbs existing ones.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

// Deterministic random source used everywhere randomness is needed.
// The mapping from raw bits to doubles/indices is spelled out here rather
// than delegated to std distributions, so a given seed produces the same
// stream on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform();

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  // Uniform index in [0, n); n must be positive. Rejection sampling, unbiased.
  std::size_t uniform_index(std::size_t n);

  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double normal();

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace embedclust
