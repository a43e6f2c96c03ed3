#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ffext {

/// Deterministic random source.  mt19937_64 is fully specified by the
/// standard and the distributions below are written out by hand, so a
/// (seed, stream) pair yields the same values on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : eng_(mix(seed, stream)) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer in [0, n); n >= 1.
  std::uint64_t below(std::uint64_t n) {
    // Rejection sampling keeps the draw unbiased and deterministic.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 == 0.0);
    u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(6.283185307179586477 * u2);
    have_spare_ = true;
    return mag * std::cos(6.283185307179586477 * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over (seed, stream) so nearby pairs decorrelate.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// k distinct values from [0, n), sorted ascending.  Selection sampling:
/// one pass, deterministic for a given Rng state.
inline std::vector<std::uint32_t> sample_without_replacement(std::size_t n,
                                                             std::size_t k,
                                                             Rng& rng) {
  std::vector<std::uint32_t> out;
  out.reserve(k);
  std::size_t need = k;
  for (std::size_t i = 0; i < n && need > 0; ++i) {
    if (rng.below(n - i) < need) {
      out.push_back(static_cast<std::uint32_t>(i));
      --need;
    }
  }
  return out;
}

}  // namespace ffext
