#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "logsp/fields.hpp"
#include "logsp/functional.hpp"
#include "logsp/symmetry.hpp"

#include <cmath>

using namespace logsp;

namespace {

Field l2_bump(const Grid& g, double cx, double cy) { return gaussian(g, cx, cy, 0.08); }

double l2(const Field& u) { return std::sqrt(integrate(u.grid(), u.values().square())); }

}  // namespace

TEST_CASE("group construction") {
  CHECK(SymmetryGroup::rotation(4).order() == 4);
  CHECK(SymmetryGroup::dihedral(4).order() == 8);
  CHECK(SymmetryGroup::dihedral(2).order() == 4);
  CHECK(SymmetryGroup::rotation(4).exact_on_grid());
  CHECK(SymmetryGroup::dihedral(4).exact_on_grid());
  CHECK_FALSE(SymmetryGroup::rotation(3).exact_on_grid());
  CHECK_FALSE(SymmetryGroup::rotation(3).meets_vf_condition());
  CHECK(SymmetryGroup::dihedral(2).meets_vf_condition());
  CHECK_THROWS_AS(SymmetryGroup::rotation(0), std::invalid_argument);
}

TEST_CASE("exact actions are permutations") {
  const Grid g(2.0, 32);
  Rng rng(1);
  const Field u = random_smooth_field(g, rng, 1.5);
  const auto G = SymmetryGroup::rotation(4);
  CHECK((apply(G.elements()[0], u).values() == u.values()).all());
  Field w = u;
  for (int i = 0; i < 4; ++i) w = apply(G.elements()[1], w);
  CHECK((w.values() == u.values()).all());

  const Field even_y = Field::from_function(g, [](double x, double y) { return std::exp(-x * x - 2 * y * y + 0.3 * x); });
  const auto D = SymmetryGroup::dihedral(4);
  GroupElement mirror;
  mirror << 1, 0, 0, -1;
  CHECK((apply(mirror, even_y).values() - even_y.values()).abs().maxCoeff() <= 1e-12);
  CHECK(D.order() == 8);
}

TEST_CASE("rotation moves a bump counterclockwise") {
  const Grid g(2.0, 64);
  const auto G = SymmetryGroup::rotation(4);
  const Field u = l2_bump(g, 0.5, 0.0);
  const Field r = apply(G.elements()[1], u);
  CHECK((r.values() - l2_bump(g, 0.0, 0.5).values()).abs().maxCoeff() < 1e-12);
}

TEST_CASE("group average") {
  const Grid g(2.0, 64);
  const auto G = SymmetryGroup::rotation(4);
  const Field u = l2_bump(g, 0.5, 0.0);
  const Field avg = group_average(G, u);
  const Field expect = 0.25 * (l2_bump(g, 0.5, 0) + l2_bump(g, 0, 0.5) + l2_bump(g, -0.5, 0) + l2_bump(g, 0, -0.5));
  CHECK((avg.values() - expect.values()).abs().maxCoeff() < 1e-12);
  CHECK((group_average(G, avg).values() - avg.values()).abs().maxCoeff() <= 1e-12);
  CHECK(symmetry_defect(G, avg) <= 1e-10);
  // Disjoint supports: ||gu - u|| = sqrt(2) ||u||.
  CHECK(symmetry_defect(G, u) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  CHECK(symmetry_defect(G, Field(g)) == 0.0);
}

TEST_CASE("group average is an orthogonal projector") {
  const Grid g(2.0, 32);
  Rng rng(4);
  const Field u = random_smooth_field(g, rng, 1.5);
  const Field v = random_smooth_field(g, rng, 1.5);
  for (const auto& G : {SymmetryGroup::rotation(4), SymmetryGroup::dihedral(2), SymmetryGroup::dihedral(4)}) {
    const double a = integrate(g, group_average(G, u).values() * v.values());
    const double b = integrate(g, u.values() * group_average(G, v).values());
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    const Field lin = group_average(G, 2.0 * u + v) - (2.0 * group_average(G, u) + group_average(G, v));
    CHECK(lin.values().abs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("radial fields are invariant") {
  const Field exact_u = gaussian(Grid(2.0, 64), 0, 0, 0.5);
  for (const auto& G : {SymmetryGroup::rotation(4), SymmetryGroup::dihedral(4)}) {
    CHECK(symmetry_defect(G, exact_u) <= 1e-12);
  }
  // Interpolated group: defect shrinks like h^2.
  const auto G3 = SymmetryGroup::rotation(3);
  double prev = 0;
  for (Index n : {32, 64, 128}) {
    const double d = symmetry_defect(G3, gaussian(Grid(2.0, n), 0, 0, 0.5));
    if (prev > 0) {
      CHECK(prev / d > 3.0);
      CHECK(prev / d < 5.0);
    }
    prev = d;
  }
}

TEST_CASE("energy and gradient are equivariant under exact elements") {
  const Grid g(3.0, 32);
  const Model model(g, Potential::constant(1.0), Nonlinearity::critical_exp(1.0, 4.0 * std::numbers::pi), 2.0);
  Rng rng(8);
  const Field u = 0.3 * random_smooth_field(g, rng, 1.0);
  const double phi = energy(u, model).total;
  const Field grad = gradient(u, model);
  const auto group = SymmetryGroup::dihedral(4);
  for (const auto& e : group.elements()) {
    const Field gu = apply(e, u);
    CHECK(std::abs(energy(gu, model).total - phi) <= 1e-10 * (1 + std::abs(phi)));
    const Field lhs = gradient(gu, model);
    const Field rhs = apply(e, grad);
    CHECK(l2(lhs - rhs) <= 1e-9 * l2(rhs));
  }
}
