#ifndef GSQ_RNG_H_
#define GSQ_RNG_H_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "gsq/model_io.h"

namespace gsq {

// Seeded draws that are bit-identical across standard libraries: only the
// engine comes from <random>, the distributions are spelled out here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  double LogUniform(double lo, double hi) {
    return std::exp(Uniform(std::log(lo), std::log(hi)));
  }
  double Normal() {
    const double u = 1.0 - Uniform();  // (0, 1]
    const double v = Uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }
  Vec3 UnitVector() {
    while (true) {
      const Vec3 v(Normal(), Normal(), Normal());
      const double n = v.norm();
      if (n > 1e-12) return v / n;
    }
  }
  std::uint64_t Bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Independent stream seed derived from a base seed (splitmix64 finalizer).
inline std::uint64_t SubSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace gsq

#endif  // GSQ_RNG_H_
