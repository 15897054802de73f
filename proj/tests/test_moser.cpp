#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "logsp/moser.hpp"
#include "logsp/symmetry.hpp"

#include <cmath>
#include <numbers>

using namespace logsp;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAlpha0 = 4.0 * kPi;

Model critical_model() {
  return Model(Grid(2.0, 16), Potential::constant(1.0), Nonlinearity::critical_exp(1.0, kAlpha0), 2.0);
}

}  // namespace

TEST_CASE("profile is continuous and vanishes outside the unit disk") {
  for (double n : {1e4, 1e6, 1e10}) {
    const MoserProfile w = moser_profile(n, 2.0);
    CHECK(w.r_in < 1.0);
    CHECK(w.plateau == doctest::Approx(std::log(1.0 / w.r_in) / std::sqrt(2 * kPi * std::log(n))).epsilon(1e-12));
    CHECK(w(1.0) == 0.0);
    CHECK(w(2.0) == 0.0);
    CHECK(w(w.r_in * (1 + 1e-12)) == doctest::Approx(w.plateau).epsilon(1e-10));
    double prev = w(0.0);
    for (double r = 1e-12; r < 1.2; r *= 1.3) {
      CHECK(w(r) <= prev);
      prev = w(r);
    }
  }
  const double ln6 = std::log(1e6);
  const double expect = std::sqrt(ln6) / std::sqrt(2 * kPi) - 2 * std::log(ln6) / (2 * std::sqrt(2 * kPi * ln6));
  CHECK(moser_profile(1e6, 2.0).plateau == doctest::Approx(expect).epsilon(1e-14));
  CHECK_THROWS_AS(moser_profile(16.0, 8.0), std::domain_error);
}

TEST_CASE("realized field is radial") {
  const Grid g(2.0, 64);
  const MoserFunction m = build_moser(1e4, 2.0, g);
  CHECK_FALSE(m.resolved);
  CHECK_FALSE(m.warning.empty());
  CHECK(symmetry_defect(SymmetryGroup::dihedral(4), m.field) <= 1e-12);
  CHECK(symmetry_defect(SymmetryGroup::rotation(3), m.field) <= 0.05);
  CHECK(m.field(0, 0) == 0.0);
}

TEST_CASE("Dirichlet energy") {
  const double e2 = std::exp(std::exp(2.0));
  CHECK(moser_grad_norm_sq(e2, 2.0).analytic == doctest::Approx(1.0 - 2.0 / std::exp(2.0)).epsilon(1e-14));
  const Grid g(2.0, 512);
  const auto v = moser_grad_norm_sq(1e4, 2.0, &g);
  CHECK(std::abs(v.radial - v.analytic) <= 1e-3 * v.analytic);
  REQUIRE(v.grid_value.has_value());
  CHECK(*v.grid_value < v.analytic);
  for (double n : {1e2, 1e4, 1e8, 1e20}) CHECK(moser_grad_norm_sq(n, 2.0).analytic < 1.0);
}

TEST_CASE("norm bound with computed delta") {
  const Model model = critical_model();
  for (double n : {1e4, 1e8}) {
    const MoserProfile w = moser_profile(n, 2.0);
    const MoserRay ray(w, model);
    const double delta = moser_delta(w);
    CHECK(delta > 0.0);
    CHECK(ray.potential_mass() == doctest::Approx(delta).epsilon(1e-10));
    CHECK(ray.grad_norm_sq() + ray.potential_mass() <= 1.0 - std::log(std::log(n)) / std::log(n) + delta + 1e-10);
    CHECK(ray.i0() < 0.0);
  }
}

TEST_CASE("radial evaluator against a direct oracle") {
  const MoserProfile w = moser_profile(1e4, 2.0);
  const Model model = critical_model();
  const MoserRay ray(w, model);
  CHECK(ray.phi(0.0) == 0.0);
  const double t = 0.8;
  // Brute-force 1-D quadrature of the potential term on a fine geometric mesh.
  double pot = kPi * w.r_in * w.r_in * model.nonlinearity().F(t * w.plateau);
  const int m = 200000;
  for (int k = 0; k < m; ++k) {
    const double s = w.s_in * (k + 0.5) / m;
    pot += w.s_in / m * 2 * kPi * std::exp(-2 * s) * model.nonlinearity().F(t * w(std::exp(-s)));
  }
  const double quad = 0.5 * t * t * (ray.grad_norm_sq() + ray.potential_mass());
  const double expect = quad + std::pow(t, 4) * ray.i0() / (8 * kPi) - pot;
  CHECK(ray.phi(t) == doctest::Approx(expect).epsilon(1e-7));
}

TEST_CASE("case (ii) envelope") {
  const Model model = critical_model();
  const double n = std::exp(100.0);
  CHECK(moser_T(n, 2.0) == doctest::Approx(100 - 2 * std::log(100.0) + std::pow(std::log(100.0), 2) / 100).epsilon(1e-14));
  const double lo = std::sqrt(3 * kPi / kAlpha0), hi = std::sqrt(8 * kPi / kAlpha0);
  CHECK_THROWS_AS(case2_envelope(n, 2.0, 0.5 * lo, model), std::domain_error);

  // Single interior maximum on the window.
  const double big = std::exp(300.0);
  int changes = 0;
  double prev_d = 0;
  const int samples = 10000;
  for (int i = 1; i < samples; ++i) {
    const double t0 = lo + (hi - lo) * (i - 1) / (samples - 1), t1 = lo + (hi - lo) * i / (samples - 1);
    const double d = case2_envelope(big, 2.0, t1, model) - case2_envelope(big, 2.0, t0, model);
    if (prev_d != 0 && (d > 0) != (prev_d > 0)) ++changes;
    if (d != 0) prev_d = d;
  }
  CHECK(changes == 1);

  // Envelope dominates once the plateau sits in the large-t regime of F.
  const MoserRay ray(moser_profile(big, 2.0), model);
  for (int i = 0; i <= 20; ++i) {
    const double t = lo + (hi - lo) * i / 20.0;
    CHECK(ray.phi(t) <= case2_envelope(big, 2.0, t, model) + 1e-9);
  }
}

TEST_CASE("threshold certificate") {
  const Model model = critical_model();
  const auto cert = threshold_certificate({1e4, 1e6}, 2.0, model);
  CHECK(cert.threshold == doctest::Approx(0.5).epsilon(1e-15));
  REQUIRE(cert.n0.has_value());
  CHECK(*cert.n0 == 1e4);
  CHECK(*cert.certified_max < 0.5 - 1e-3);
  CHECK(*cert.certified_max > 0.0);
  for (const auto& e : cert.entries) {
    REQUIRE(e.t_max.has_value());
    // Maximizer approaches sqrt(4 pi / alpha0) = 1 from above.
    CHECK(*e.t_max > 1.0);
    CHECK(*e.t_max < 1.2);
  }
  CHECK(*cert.entries[1].t_max < *cert.entries[0].t_max);
  const auto bad = threshold_certificate({16.0, 1e4}, 8.0, model);
  CHECK_FALSE(bad.entries[0].error.empty());
  CHECK(bad.entries[1].error.empty());
}

TEST_CASE("energy is non-positive past the window for large n") {
  const Model model = critical_model();
  const MoserRay ray(moser_profile(1e10, 2.0), model);
  const double hi = std::sqrt(8 * kPi / kAlpha0);
  for (double t = hi; t < 20; t *= 1.2) CHECK(ray.phi(t) <= 0.0);
}
