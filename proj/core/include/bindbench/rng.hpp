#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace bindbench {

// Derives an independent stream seed from (master seed, key), so trials can be
// generated in any order or on any worker and still produce identical bytes.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view key);

// mt19937_64 with distributions written out here: the standard library leaves
// distribution algorithms implementation-defined, which breaks byte reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Uniform on [lo, hi], inclusive.
  int uniform_int(int lo, int hi);

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();

  bool bernoulli(double p) { return uniform01() < p; }

  // Standard normal via Box-Muller; consumes two uniforms per call.
  double normal();

  std::uint64_t binomial(std::uint64_t trials, double p);

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  template <class T>
  const T& pick(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(below(items.size()))];
  }

  // k distinct indices from [0, n), in random order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace bindbench
