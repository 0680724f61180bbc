#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fsec {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seeded random stream. All bounded draws use rejection sampling on the raw
// 64-bit output, so sequences are identical on every platform (the std
// distributions are implementation-defined and would break that).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return static_cast<std::size_t>(r % bound);
    }
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform_real() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform_real() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

  // k distinct elements drawn uniformly without replacement, in draw order.
  template <typename T>
  std::vector<T> sample_without_replacement(const std::vector<T>& pool, std::size_t k) {
    std::vector<T> scratch = pool;
    std::vector<T> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k && i < scratch.size(); ++i) {
      const std::size_t j = i + uniform_index(scratch.size() - i);
      std::swap(scratch[i], scratch[j]);
      out.push_back(scratch[i]);
    }
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fsec
