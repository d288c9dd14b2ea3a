#pragma once

#include <cstdint>

namespace mednorm {

// SplitMix64 (Steele, Lea, Flood 2014). One fixed, portable generator so that
// fold splits and synthetic corpora reproduce bit-for-bit across platforms;
// std::mt19937 + std::shuffle would not give that guarantee.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Plain modulo; the bias is < 2^-53 for any n that fits
  // a corpus index and keeps the draw sequence trivially specifiable.
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

// Fisher-Yates with SplitMix64; index draws via next_below.
template <typename Vec>
void deterministic_shuffle(Vec& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    using std::swap;
    swap(v[i - 1], v[j]);
  }
}

// FNV-1a, used for training-set digests and config hashes.
inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace mednorm
