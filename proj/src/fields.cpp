#include "logsp/fields.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace logsp {

Field gaussian(const Grid& grid, double cx, double cy, double width, double amplitude) {
  const double inv = 1.0 / (width * width);
  return Field::from_function(grid, [=](double x, double y) {
    const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
    return amplitude * std::exp(-r2 * inv);
  });
}

Field smooth_bump(const Grid& grid, double cx, double cy, double radius, double amplitude) {
  if (!(radius > 0)) throw std::invalid_argument("smooth_bump: radius must be positive");
  return Field::from_function(grid, [=](double x, double y) {
    const double s = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (radius * radius);
    return s < 1.0 ? amplitude * std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
  });
}

Field random_smooth_field(const Grid& grid, Rng& rng, double support_radius, int count) {
  Field out(grid);
  for (int b = 0; b < count; ++b) {
    const double radius = rng.uniform(0.25, 0.6) * support_radius;
    const double reach = support_radius - radius;
    const double rho = reach * std::sqrt(rng.uniform());
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double amplitude = rng.uniform(0.2, 1.0);
    out += smooth_bump(grid, rho * std::cos(angle), rho * std::sin(angle), radius, amplitude);
  }
  return out;
}

Field bump_ring(const Grid& grid, int k, double ring_radius, double width, double amplitude) {
  if (k < 1) throw std::invalid_argument("bump_ring: k must be >= 1");
  Field out(grid);
  for (int j = 0; j < k; ++j) {
    const double angle = 2.0 * std::numbers::pi * j / k;
    out += gaussian(grid, ring_radius * std::cos(angle), ring_radius * std::sin(angle), width,
                    amplitude);
  }
  return out;
}

}  // namespace logsp
