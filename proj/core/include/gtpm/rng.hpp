#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace gtpm {

// splitmix64 finalizer. Fully specified, so streams are identical on
// every platform; std:: distributions are avoided for the same reason.
inline uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for the sub-stream identified by (a, b) under a master seed, e.g.
// walk k started from node v. Serial and parallel runs agree because each
// pair owns its own stream.
inline uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0) {
  return mix64(mix64(master ^ mix64(a)) ^ mix64(b + 0x632BE59BD9B4E019ULL));
}

// splitmix64 sequence generator.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). n must be positive. Modulo bias is n/2^64.
  uint64_t next_index(uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller on the portable uniform stream.
  double next_gaussian() {
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  uint64_t state_;
};

// Fisher-Yates shuffle driven by the portable generator.
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (size_t i = values.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.next_index(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace gtpm
