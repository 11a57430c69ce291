#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace scalemix {

// SplitMix64 finalizer. Bijective on 64-bit words, used to decorrelate
// structured seed inputs before they reach an engine.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Substream salts keep the per-history and per-replicate seed domains
// disjoint.
constexpr std::uint64_t kHistoryStreamSalt = 0x73696d2d68697374ull;
constexpr std::uint64_t kBootstrapStreamSalt = 0x626f6f742d726570ull;

// Substream rule: stream k of a run seeded with `seed` uses
// mix64(mix64(seed ^ salt) + k). The mapping is fixed, so results are
// independent of how streams are distributed over threads.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t k,
                                       std::uint64_t salt) {
  return mix64(mix64(seed ^ salt) + k);
}

// Deterministic random stream: a seeded mt19937_64 plus the variate
// transforms used in this project. Not thread-safe; each stream is owned
// by a single caller.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via the Marsaglia polar method; the second variate of
  // each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace scalemix
