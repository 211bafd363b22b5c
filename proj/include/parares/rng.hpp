// Counter-keyed random streams for Monte Carlo ensembles.
//
// Each trajectory gets its own generator seeded from (seed, index), so a
// parallel ensemble draws exactly the same numbers as a serial one no matter
// how trajectories are scheduled across workers. The generator is SplitMix64
// and the transforms are hand-rolled (Box-Muller, inverse-CDF Rayleigh) so
// streams do not depend on standard-library distribution internals.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace parares {

class TrajectoryRng {
 public:
  TrajectoryRng(std::uint64_t seed, std::uint64_t trajectory_index)
      : state_(mix(mix(seed) + 0x9e3779b97f4a7c15ULL * (trajectory_index + 1))) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the second member of each pair is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u in (0,1] so the log is finite.
    const double u = 1.0 - uniform();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double phi = 2.0 * std::numbers::pi * v;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  // Rayleigh with scale sigma: pdf (A/sigma^2) exp(-A^2 / (2 sigma^2)).
  double rayleigh(double sigma) {
    const double u = 1.0 - uniform();
    return sigma * std::sqrt(-2.0 * std::log(u));
  }

 private:
  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix_final(state_);
  }

  static std::uint64_t mix(std::uint64_t z) { return mix_final(z + 0x9e3779b97f4a7c15ULL); }

  static std::uint64_t mix_final(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace parares
