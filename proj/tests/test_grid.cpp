#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "logsp/fields.hpp"
#include "logsp/grid.hpp"
#include "logsp/potential.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace logsp;

namespace {

Field unit_gaussian(const Grid& g) {
  return Field::from_function(g, [](double x, double y) { return std::exp(-0.5 * (x * x + y * y)); });
}

Field constant_field(const Grid& g, double c) {
  return Field::from_function(g, [c](double, double) { return c; });
}

}  // namespace

TEST_CASE("grid layout is cell centered") {
  const Grid g(1.0, 4);
  CHECK(g.spacing() == 0.5);
  CHECK(g.coord(0) == -0.75);
  CHECK(g.coord(1) == -0.25);
  CHECK(g.coord(2) == 0.25);
  CHECK(g.coord(3) == 0.75);
  CHECK(Grid(8.0, 256).spacing() == 0.0625);
  CHECK(g.spacing() * g.size() == 2.0 * g.half_width());
  for (Index i = 0; i < 4; ++i) CHECK(g.coord(i) == -g.coord(3 - i));
}

TEST_CASE("grid rejects bad sizes") {
  CHECK_THROWS_AS(Grid(1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(Grid(1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(Grid(0.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid(-1.0, 8), std::invalid_argument);
  CHECK_NOTHROW(make_grid(2.0, 8));
}

TEST_CASE("integrate") {
  for (Index n : {4, 8, 16, 64}) CHECK(integrate(constant_field(Grid(1.0, n), 1.0)) == 4.0);
  const Grid g(8.0, 256);
  const Field w = Field::from_function(g, [](double x, double y) { return std::exp(-(x * x + y * y)); });
  CHECK(std::abs(integrate(w) - std::numbers::pi) < 1e-8);
  CHECK(integrate(Field(g)) == 0.0);
}

TEST_CASE("integrate is linear and monotone") {
  const Grid g(2.0, 32);
  Rng rng(7);
  const Field a = random_smooth_field(g, rng, 1.0);
  const Field b = random_smooth_field(g, rng, 1.0);
  CHECK(integrate(2.0 * a + b) == doctest::Approx(2.0 * integrate(a) + integrate(b)).epsilon(1e-13));
  const Field lo = a;
  const Field hi = a + Field(g, b.values().abs());
  CHECK(integrate(lo) <= integrate(hi));
}

TEST_CASE("H norm of a Gaussian") {
  const Grid g(8.0, 256);
  const Field u = unit_gaussian(g);
  const Field v1 = Potential::constant(1.0).sample(g);
  CHECK(norm_H(Field(g), v1) == 0.0);
  CHECK(std::abs(norm_H(u, v1) - std::sqrt(2.0 * std::numbers::pi)) < 1e-3);
  const Field v4 = Potential::constant(4.0).sample(g);
  CHECK(norm_H(u, v4) > norm_H(u, v1));
}

TEST_CASE("H inner product") {
  const Grid g(4.0, 64);
  Rng rng(3);
  const Field u = random_smooth_field(g, rng, 2.0);
  const Field v = random_smooth_field(g, rng, 2.0);
  const Field V = Potential::radial(1.0, 0.5, 1.0).sample(g);
  CHECK(inner_H(u, u, V) == doctest::Approx(std::pow(norm_H(u, V), 2)).epsilon(1e-12));
  CHECK(inner_H(u, Field(g), V) == 0.0);
  CHECK(inner_H(u, v, V) == inner_H(v, u, V));
}

TEST_CASE("negative Laplacian is the variation of the Dirichlet energy") {
  const Grid g(2.0, 16);
  Rng rng(11);
  const Field u = random_smooth_field(g, rng, 1.5);
  const Field v = random_smooth_field(g, rng, 1.5);
  const double lhs = dirichlet_inner(u, v);
  const double rhs = integrate(g, neg_laplacian(u) * v.values());
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("star norm") {
  const Grid g(8.0, 256);
  CHECK(norm_star(Field(g), 2.0) == 0.0);
  CHECK_THROWS_AS(norm_star(Field(g), 1.5), std::invalid_argument);

  const double rho = 1.5;
  Rng rng(5);
  const Field u = random_smooth_field(g, rng, rho);
  for (double p : {2.0, 3.0}) {
    CHECK(std::pow(norm_star(u, p), p) <= std::log1p(rho) * std::pow(norm_Lq(u, p), p));
  }

  const Grid fine(8.0, 1024);
  const double ref = norm_star(unit_gaussian(fine), 2.0);
  CHECK(std::abs(norm_star(unit_gaussian(g), 2.0) - ref) <= 1e-4 * ref);
}

TEST_CASE("Lq norm and composite norm") {
  const Grid g(1.0, 8);
  CHECK(norm_Lq(constant_field(g, 1.0), 2.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(norm_Lq(Field(g), 3.0) == 0.0);
  const Grid big(4.0, 64);
  const Field u = unit_gaussian(big);
  const Field V = Potential::constant(1.0).sample(big);
  CHECK(norm_Xp(u, V, 2.0) == norm_H(u, V) + norm_star(u, 2.0));
}

TEST_CASE("norms are absolutely homogeneous") {
  const Grid g(4.0, 64);
  Rng rng(9);
  const Field u = random_smooth_field(g, rng, 2.0);
  const Field V = Potential::constant(2.0).sample(g);
  for (double c : {-3.0, 0.25, 7.0}) {
    const Field cu = c * u;
    CHECK(norm_H(cu, V) == doctest::Approx(std::abs(c) * norm_H(u, V)).epsilon(1e-12));
    CHECK(norm_star(cu, 3.0) == doctest::Approx(std::abs(c) * norm_star(u, 3.0)).epsilon(1e-12));
    CHECK(norm_Lq(cu, 4.0) == doctest::Approx(std::abs(c) * norm_Lq(u, 4.0)).epsilon(1e-12));
  }
}

TEST_CASE("grid refinement is at least second order") {
  // Differences of successive refinements; the H norm has a genuine h^2 term,
  // the midpoint-rule norms converge at least as fast.
  double h_norm[4], star[4], lq[4];
  const Index sizes[4] = {32, 64, 128, 256};
  for (int k = 0; k < 4; ++k) {
    const Grid g(4.0, sizes[k]);
    const Field u = Field::from_function(g, [](double x, double y) {
      return std::exp(-0.5 * ((x - 0.3) * (x - 0.3) + y * y));
    });
    h_norm[k] = norm_H(u, Potential::constant(1.0).sample(g));
    star[k] = norm_star(u, 2.0);
    lq[k] = norm_Lq(u, 4.0);
  }
  auto ratio = [](const double* v) { return std::abs(v[1] - v[2]) / std::abs(v[2] - v[3]); };
  CHECK(ratio(h_norm) >= 3.0);
  CHECK(ratio(h_norm) <= 5.0);
  const double r_star = std::abs(star[0] - star[1]) / std::max(std::abs(star[1] - star[2]), 1e-300);
  CHECK(r_star >= 3.0);
  // The midpoint rule is spectrally accurate for this Gaussian; the Lq values are
  // already at roundoff, so only bound the change.
  CHECK(std::abs(lq[1] - lq[2]) <= std::max(std::abs(lq[0] - lq[1]) / 3.0, 1e-13));
}

TEST_CASE("boundary decay proxy") {
  const Grid g(8.0, 64);
  CHECK(decays_at_boundary(unit_gaussian(g)));
  CHECK_FALSE(decays_at_boundary(constant_field(g, 1.0)));
}

TEST_CASE("field csv dump") {
  const Grid g(1.0, 4);
  const Field u = Field::from_function(g, [](double x, double y) { return x + 10 * y; });
  std::ostringstream os;
  write_field_csv(os, u);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "x,y,u");
  std::getline(is, line);
  CHECK(line == "-0.75,-0.75,-8.25");
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 16);
}

TEST_CASE("potentials") {
  const Grid g(8.0, 64);
  const auto c = check_potential(Potential::constant(1.0), g);
  CHECK(c.nonnegative);
  CHECK(c.coercive_at_boundary);
  CHECK_THROWS(Potential::constant(-1.0));
  const Potential ks = Potential::k_symmetric(1.0, 0.2, 1.0, 4);
  CHECK(ks(0.7, 0.2) == doctest::Approx(ks(-0.2, 0.7)).epsilon(1e-12));
}
