#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace dvsnoise {

/// Finalizer from the splitmix64 generator. Used both as the splitmix
/// state-advance output function and as a cheap hash for deriving
/// independent substreams from (seed, coordinate, tag) tuples.
inline constexpr uint64_t splitmix64_mix(uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives a stream seed that is a pure function of its inputs. Feeding
/// each component through the mixer before combining keeps nearby
/// (x, y) pairs from producing correlated streams.
inline constexpr uint64_t derive_stream_seed(uint64_t master, uint64_t a,
                                             uint64_t b, uint64_t c) {
  uint64_t s = splitmix64_mix(master ^ 0x6A09E667F3BCC909ULL);
  s = splitmix64_mix(s ^ splitmix64_mix(a ^ 0xBB67AE8584CAA73BULL));
  s = splitmix64_mix(s ^ splitmix64_mix(b ^ 0x3C6EF372FE94F82BULL));
  s = splitmix64_mix(s ^ splitmix64_mix(c ^ 0xA54FF53A5F1D36F1ULL));
  return s;
}

// Stream tags for the substreams one simulation draws from.
inline constexpr uint64_t kStreamPixelNoise = 1;
inline constexpr uint64_t kStreamMismatch = 2;
inline constexpr uint64_t kStreamSweepPoint = 3;

/// xoshiro256++ (Blackman & Vigna). Small state, cross-platform
/// deterministic output, which the byte-identical replay contract needs.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(uint64_t seed = 0) {
    uint64_t sm = seed;
    for (auto& w : state_) {
      sm += 0x9E3779B97F4A7C15ULL;
      w = splitmix64_mix(sm);
    }
  }

  uint64_t next() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool operator==(const Xoshiro256pp&) const = default;

 private:
  static constexpr uint64_t rotl(uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<uint64_t, 4> state_{};
};

/// Standard-normal generator: Box-Muller on a Xoshiro256pp stream.
/// Avoids std::normal_distribution, whose output is not pinned by the
/// standard and varies across library implementations.
class GaussianRng {
 public:
  explicit GaussianRng(uint64_t seed = 0) : engine_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // 1 - u in (0, 1] keeps the log argument away from zero.
    const double u1 = 1.0 - engine_.uniform();
    const double u2 = engine_.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  bool operator==(const GaussianRng&) const = default;

 private:
  Xoshiro256pp engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace dvsnoise
