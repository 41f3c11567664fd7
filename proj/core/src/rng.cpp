#include "graphmax/rng.hpp"

#include <stdexcept>
#include <string>

namespace graphmax {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
  // Rejection sampling over the largest multiple of n that fits in 64 bits.
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return x % n;
}

int Rng::range(int lo, int hi) {
  if (lo >= hi) {
    throw std::invalid_argument("Rng::range: empty range [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + ")");
  }
  return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo)));
}

std::vector<int> Rng::sample_without_replacement(int n, int k) {
  if (k < 0 || k > n) {
    throw std::invalid_argument("sample_without_replacement: k=" + std::to_string(k) +
                                " out of range for n=" + std::to_string(n));
  }
  // Partial Fisher-Yates over an index pool.
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  std::vector<int> out(k);
  for (int i = 0; i < k; ++i) {
    int j = i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
    out[i] = pool[i];
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ stream * 0x9E3779B97F4A7C15ULL);
}

}  // namespace graphmax
