#pragma once

#include <cstdint>
#include <random>

namespace wgamp {

/// splitmix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds a stream index into a seed. Order-sensitive, so
/// seed_chain(seed_chain(s, a), b) != seed_chain(seed_chain(s, b), a).
constexpr std::uint64_t seed_chain(std::uint64_t h, std::uint64_t v) noexcept {
  return mix64(h ^ mix64(v + 1));
}

/// Deterministic double-precision generator. mt19937_64 has a sequence fixed
/// by the standard, and Gaussian draws use Box-Muller here instead of
/// std::normal_distribution, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on [0, 1).
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal draw.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the log finite.
    const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = mag * std::sin(ang);
    has_spare_ = true;
    return mag * std::cos(ang);
  }

  double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace wgamp
