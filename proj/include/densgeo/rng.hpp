#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>

#include "densgeo/density.hpp"
#include "densgeo/space.hpp"

namespace densgeo {

// splitmix64 generator with Box-Muller Gaussians. The exact update, output
// and caching steps below are part of the library contract, so seeded trials
// are reproducible across implementations at the sequence level.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal; generates pairs and caches the second variate.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // in (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  ScalarField gaussian_field(int n) {
    ScalarField g(n);
    for (int i = 0; i < n; ++i) {
      g[i] = gaussian();
    }
    return g;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Random density: normalized exponentiated Gaussian field exp(sigma·g)/Z.
inline Density random_density(std::shared_ptr<const Space> space, SplitMix64& rng,
                              double sigma = 0.5) {
  const ScalarField g = rng.gaussian_field(space->size());
  return Density::normalized(std::move(space), (sigma * g.array()).exp().matrix());
}

// Random tangent vector: volume-centered Gaussian field, scaled to unit
// Fisher-Rao norm at μ.
inline TangentVector random_tangent(const Density& mu, SplitMix64& rng) {
  const Space& sp = mu.space();
  ScalarField g = rng.gaussian_field(sp.size());
  g.array() -= g.dot(sp.volumes()) / sp.total_volume();
  TangentVector s(mu.space_ptr(), std::move(g));
  const double nrm = fisher_rao_norm(mu, s);
  return nrm > 0.0 ? s * (1.0 / nrm) : s;
}

}  // namespace densgeo
