#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace recmem {

// Deterministic RNG usable across platforms. std::mt19937_64 has a
// standard-specified output sequence; the distributions below are hand-rolled
// because the std::*_distribution classes are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Unbiased integer in [0, n) via rejection sampling. n must be > 0.
  std::uint64_t bounded(std::uint64_t n);

  // Uniform double in [0, 1) with 53 bits of entropy.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Box-Muller; consumes two uniforms per pair, caches the spare.
  double normal(double mean, double stddev);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i + 1));
      std::swap(v[i], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64 finalizer; mixes a stream index into a base seed so derived
// streams are decorrelated.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace recmem
