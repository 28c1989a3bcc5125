#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "iclgap/errors.hpp"

namespace iclgap {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Role tags keep derived streams disjoint: two streams derived from the same
// base seed but different tags never coincide.
enum class StreamTag : std::uint64_t {
  Subsample = 1,  // per-(seed, setting) query subsampling
  Exemplar = 2,   // per-(seed, setting, query id) random fill
  Bootstrap = 3,  // per-(seed, resample index) bootstrap draws
  Noise = 4,      // per-(seed, prompt hash) mock corruption
  Ci = 5,         // per-setting report confidence intervals
  Synth = 6,      // synthetic data generation in tests and bench
};

inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t base, StreamTag tag,
                                 std::initializer_list<std::uint64_t> parts = {}) {
  std::uint64_t h = splitmix64(base ^ static_cast<std::uint64_t>(tag) * 0x9e3779b97f4a7c15ull);
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Unbiased integer in [0, n) via rejection sampling.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw ArgumentError("RngStream::below: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform double in [0, 1) with 53 bits of precision.
  double next_double01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 eng_;
};

// First k entries of a Fisher-Yates shuffle of 0..n-1, in draw order.
// Consumes exactly k below() calls; selection code and its test oracles
// rely on this draw pattern.
inline std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n,
                                                             std::uint32_t k,
                                                             RngStream& rng) {
  if (k > n) k = n;
  std::vector<std::uint32_t> idx(n);
  for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::uint64_t j = i + rng.below(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace iclgap
