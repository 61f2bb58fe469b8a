#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "rnav/linalg.hpp"

namespace rnav {

// Seeded stream with platform-independent uniform/normal draws (the
// standard distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Independent stream for a sub-task (e.g. one level), derived with splitmix64.
  static Rng split(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return Rng(z ^ (z >> 31));
  }

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vec<double> unit_vector(int n) {
    Vec<double> v(n);
    double s = 0.0;
    do {
      for (int i = 0; i < n; ++i) v[i] = normal();
      s = norm(v);
    } while (s < 1e-12);
    return (1.0 / s) * v;
  }

  // Uniform in the open ball of the given radius.
  Vec<double> in_ball(int n, double radius) {
    Vec<double> d = unit_vector(n);
    const double r = radius * std::pow(uniform(), 1.0 / n);
    return r * d;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace rnav
