#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

namespace mixgan {

// xoshiro256++ with an explicit, serializable state. The training loop's
// stream is checkpointed, so the engine must round-trip bit-exactly and the
// normal sampler must not keep hidden cache state between draws.
class RandomEngine {
 public:
  explicit RandomEngine(std::uint64_t seed) { reseed(seed); }
  RandomEngine() : RandomEngine(0) {}

  void reseed(std::uint64_t seed) {
    // splitmix64 expansion of the seed into the four state words.
    std::uint64_t x = seed;
    for (auto& w : state_) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      w = z ^ (z >> 31);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be > 0. Rejection-free modulo is fine
  // here; the bias at 64-bit width is immaterial for data shuffling.
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller. Two uniforms are consumed per call and
  // the second output is discarded, so there is no cached half-sample and the
  // engine state alone determines the stream.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Fills n values with i.i.d. standard normals, using both Box-Muller
  // outputs per pair of uniforms.
  template <typename T>
  void fill_normal(T* out, std::size_t n) {
    std::size_t i = 0;
    while (i + 1 < n) {
      const double u1 = 1.0 - uniform();
      const double u2 = uniform();
      const double r = std::sqrt(-2.0 * std::log(u1));
      const double a = 2.0 * std::numbers::pi * u2;
      out[i++] = static_cast<T>(r * std::cos(a));
      out[i++] = static_cast<T>(r * std::sin(a));
    }
    if (i < n) out[i] = static_cast<T>(normal());
  }

  template <typename Container>
  void shuffle(Container& v) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_index(i + 1));
      std::swap(v[i], v[j]);
    }
  }

  std::array<std::uint64_t, 4> state() const { return state_; }
  void set_state(const std::array<std::uint64_t, 4>& s) { state_ = s; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

// Stable seed derivation for independent sub-streams (per-epoch shuffles,
// init streams, ...). Pure function of its inputs.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  std::uint64_t z = master ^ (a * 0x9e3779b97f4a7c15ULL) ^
                    (b * 0xd1b54a32d192ed03ULL) ^ 0x2545f4914f6cdd1dULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace mixgan
