#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ecc {

// Seeded generator with samplers pinned in this header, so that a given
// (seed, draw order) reproduces bit-identical streams on every platform.
// std::mt19937_64 output is fully specified by the standard; the
// distribution transforms below are our own and never change.
// Stream id "ecc-rng-v1".
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Derives an independent stream seed, e.g. per restart. splitmix64 mix.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0, 1); 53-bit resolution, zero excluded.
  double uniform() {
    for (;;) {
      const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n); rejection sampled.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
    for (;;) {
      const std::uint64_t v = gen_();
      if (v < limit) return v % n;
    }
  }

  // Box-Muller, cosine branch only (one normal per two uniforms).
  double normal(double mean, double sd) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * r * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Marsaglia-Tsang for shape >= 1; boosted by u^(1/shape) below 1.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0);
      return g * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal(0.0, 1.0);
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    const double s = x + y;
    return s > 0.0 ? x / s : 0.0;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ecc
