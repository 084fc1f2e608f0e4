#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "gbmap/types.hpp"

namespace gbmap {

/// SplitMix64 finalizer. Used to derive independent child seeds from a master
/// seed plus a salt (stage index, fold index, ...), so reordering unrelated
/// draws never perturbs a component's stream.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministic random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; the uniform and normal transforms
/// are spelled out here instead of using std::*_distribution, whose results
/// are implementation-defined. Dataset sidecars record the scheme as
/// "mt19937_64/u53/box-muller".
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive, via rejection sampling (unbiased).
  int uniform_int(int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: hi < lo");
    const std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<int>(lo + static_cast<std::int64_t>(x % range));
  }

  /// Standard normal via Box-Muller. No spare caching, so the draw count per
  /// call is constant and the stream layout stays easy to reason about.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));  // log(1-u1), u1 in [0,1)
    return r * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Uniform direction on the unit sphere in R^dim: i.i.d. normals, normalized.
  Vector unit_vector(Index dim) {
    Vector v(dim);
    double norm = 0.0;
    do {
      for (Index i = 0; i < dim; ++i) v[i] = normal();
      norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gbmap
