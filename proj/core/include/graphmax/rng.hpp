#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace graphmax {

// Deterministic RNG with hand-rolled distributions on top of mt19937_64.
// Standard-library distributions are implementation-defined, so every draw
// here goes through these primitives to keep outputs stable across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53 mantissa bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform in [0, n) without modulo bias.
  std::uint64_t below(std::uint64_t n);

  // Uniform in [lo, hi), integer endpoints.
  int range(int lo, int hi);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct values from [0, n), in draw order.
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  std::mt19937_64 gen_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Derives an independent stream seed from a master seed. Every randomized
// stage of the pipeline owns a distinct stream tag.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

namespace seed_stream {
inline constexpr std::uint64_t kEncoderInit = 1;
inline constexpr std::uint64_t kHierarchyInit = 2;
inline constexpr std::uint64_t kPeripherySampler = 3;
inline constexpr std::uint64_t kHierarchicalSampler = 4;
inline constexpr std::uint64_t kEvalFolds = 5;
inline constexpr std::uint64_t kKmeans = 6;
inline constexpr std::uint64_t kSynthetic = 7;
}  // namespace seed_stream

}  // namespace graphmax
