// Deterministic random sources. std::mt19937_64 has a standard-mandated
// stream, but the std distributions do not, so the distribution math lives
// here: identical seeds must give bit-identical artifacts on any platform.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

namespace swarmload {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform_in(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  /// Gaussian draw via Box-Muller; the paired value is cached.
  double normal(double mu, double sigma) {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return mu + sigma * z;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    spare_ = radius * std::sin(kTwoPi * u2);
    return mu + sigma * radius * std::cos(kTwoPi * u2);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Stateless mix for per-entity draws that must not depend on iteration
/// order (e.g. one comm-dropout draw per vehicle per tick).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double hash_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return static_cast<double>(mix64(seed ^ mix64(a ^ mix64(b))) >> 11) * 0x1.0p-53;
}

}  // namespace swarmload
