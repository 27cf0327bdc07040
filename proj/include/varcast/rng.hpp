#pragma once

#include <cstdint>
#include <vector>

namespace varcast::stats {

/// Deterministic splittable pseudo-random generator.
///
/// The engine is SplitMix64: the state walks a Weyl sequence with the 64-bit
/// golden-ratio increment and each output is a finalizing bit mix of the new
/// state. The algorithm is fixed here (no std::mt19937 or platform engines)
/// so that a seed pins the exact output stream everywhere the code runs.
///
/// Child streams are derived from the construction seed and a stream key,
/// never from the parent's current position, so `child(k)` is independent of
/// how much the parent has already drawn. Parallel tasks each take their own
/// child; an Rng instance itself is single-owner and not thread-safe.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  /// Independent stream keyed by (construction seed, stream).
  Rng child(std::uint64_t stream) const {
    return Rng(mix64(seed_ + 0x9E3779B97F4A7C15ULL * (stream + 1)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1); safe to feed inverse CDFs.
  double next_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal draw by inverse-CDF transform (one uniform per draw).
  double next_normal();

  /// Unbiased-enough bounded draw via 128-bit multiply-shift; fixed scheme,
  /// used for deterministic shuffling.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace varcast::stats
