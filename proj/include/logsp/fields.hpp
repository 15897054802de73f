#pragma once

// Test-field factories and a platform-stable random source.

#include "logsp/grid.hpp"

#include <cstdint>
#include <random>

namespace logsp {

/// mt19937_64 with hand-rolled uniform mapping so seeded draws are identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

Field gaussian(const Grid& grid, double cx, double cy, double width, double amplitude = 1.0);

/// C-infinity bump amplitude * exp(1 - 1/(1 - (r/radius)^2)), zero for r >= radius.
Field smooth_bump(const Grid& grid, double cx, double cy, double radius, double amplitude = 1.0);

/// Sum of `count` random smooth bumps, each fully contained in B_support(0).
Field random_smooth_field(const Grid& grid, Rng& rng, double support_radius, int count = 5);

/// k Gaussian bumps of the given width placed at angles 2 pi j / k on a circle.
Field bump_ring(const Grid& grid, int k, double ring_radius, double width, double amplitude = 1.0);

}  // namespace logsp
