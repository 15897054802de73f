#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "logsp/fields.hpp"
#include "logsp/solver.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace logsp;

namespace {

constexpr double kPi = std::numbers::pi;

Model power_model(const Grid& g, double p = 2.0, double q = 4.0) {
  return Model(g, Potential::constant(1.0), Nonlinearity::subcritical_power(1.0, q), p);
}

Model critical_model(const Grid& g) {
  return Model(g, Potential::constant(1.0), Nonlinearity::critical_exp(1.0, 4.0 * kPi), 2.0);
}

}  // namespace

TEST_CASE("fiber maximum against the quartic closed form") {
  const Grid g(4.0, 48);
  const Model model = power_model(g);
  Rng rng(1);
  const Field u = random_smooth_field(g, rng, 1.5);
  const double A = norm_H_squared(u, model.V());
  const double B = integrate(g, u.values().pow(4));
  const double I0 = functional_I(model.kernels().a0(), u, 2.0);
  const double t_exact = std::sqrt(A / (B - I0 / (2 * kPi)));
  const FiberResult fr = fiber_maximize(u, model);
  CHECK(std::abs(fr.t - t_exact) <= 1e-8 * t_exact);
  CHECK(fr.unique);
  CHECK(fr.phi == doctest::Approx(A * A / (4 * (B - I0 / (2 * kPi)))).epsilon(1e-10));

  const FiberResult scaled = fiber_maximize(3.0 * u, model);
  CHECK(scaled.t == doctest::Approx(fr.t / 3.0).epsilon(1e-8));
  CHECK(scaled.phi == doctest::Approx(fr.phi).epsilon(1e-8));
}

TEST_CASE("fiber derivative changes sign once for monotone families") {
  const Grid g(4.0, 32);
  Rng rng(2);
  for (const auto& model : {power_model(g), power_model(g, 3.0, 6.0), critical_model(g)}) {
    const Field u = random_smooth_field(g, rng, 1.0);
    CHECK(fiber_sign_changes(RayProfile(u, model), 1e-4, 1e2, 10000) == 1);
    const FiberResult fr = fiber_maximize(u, model);
    CHECK(std::abs(RayProfile(u, model).dphi(fr.t)) <= 1e-8 * fr.t * norm_H_squared(u, model.V()));
  }
}

TEST_CASE("degenerate fibers are rejected") {
  const Grid g(4.0, 32);
  const Model flat(g, Potential::constant(1.0), Nonlinearity::zero(), 2.0);
  // Spread support makes the log term positive, so zeta' > 0 for every t.
  const Field u = gaussian(g, 0, 0, 2.0);
  REQUIRE(RayProfile(u, flat).i0() > 0);
  CHECK_THROWS_AS(fiber_maximize(u, flat), std::runtime_error);
  CHECK_THROWS_AS(fiber_maximize(Field(g), power_model(g)), std::runtime_error);
}

TEST_CASE("config validation") {
  SolveConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.rel_tol = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolveConfig{};
  cfg.init = InitKind::File;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("Riesz map inverts -Delta + V") {
  const Grid g(3.0, 24);
  const Model model(g, Potential::radial(1.0, 0.5, 1.0), Nonlinearity::zero(), 2.0);
  Rng rng(4);
  const Field u = random_smooth_field(g, rng, 2.0);
  const Field Ku(g, neg_laplacian(u) + model.V().values() * u.values());
  const Field back = RieszMap(model)(Ku);
  CHECK((back.values() - u.values()).abs().maxCoeff() <= 1e-12 * u.values().abs().maxCoeff());
}

TEST_CASE("Nehari descent certificate") {
  const Grid g(6.0, 48);
  const Model model = power_model(g);
  const auto G = SymmetryGroup::rotation(4);
  SolveConfig cfg;
  cfg.init = InitKind::RandomSymmetric;
  cfg.seed = 5;
  const SolveReport rep = nehari_minimize(cfg, model, G);
  REQUIRE(rep.verdict == SolveVerdict::Converged);
  const Field& u = *rep.u;
  CHECK(rep.rho <= 1e-6 * (1 + std::abs(rep.phi)));
  CHECK(rep.phi > 0);
  CHECK(std::abs(rep.nehari) <= 1e-6 * rep.norm_sq);
  CHECK(rep.t_u == doctest::Approx(1.0).epsilon(1e-6));

  for (std::size_t i = 0; i < rep.trace.size(); ++i) {
    CHECK(rep.trace[i].defect <= cfg.sym_tol);
    if (i > 0) CHECK(rep.trace[i].phi <= rep.trace[i - 1].phi + 1e-12 * (1 + std::abs(rep.trace[i - 1].phi)));
  }
  REQUIRE(rep.trace.size() > 10);
  const std::size_t last = rep.trace.size() - 1;
  CHECK(rep.trace[last].rho < rep.trace[last - 10].rho);

  Rng rng(6);
  const Field grad = gradient(u, model);
  for (int k = 0; k < 10; ++k) {
    const Field v = group_average(G, random_smooth_field(g, rng, 3.0));
    CHECK(std::abs(integrate(g, grad.values() * v.values())) <= 1e-5 * norm_H(v, model.V()));
  }

  cfg.seed = 6;
  const SolveReport other = nehari_minimize(cfg, model, G);
  REQUIRE(other.verdict == SolveVerdict::Converged);
  CHECK(std::abs(other.phi - rep.phi) <= 1e-4 * rep.phi);
}

TEST_CASE("mountain pass reaches the Nehari level") {
  const Grid g(6.0, 32);
  const Model model = power_model(g);
  const auto G = SymmetryGroup::rotation(4);
  SolveConfig cfg;
  const SolveReport neh = nehari_minimize(cfg, model, G);
  const SolveReport mp = mountain_pass(cfg, model, G);
  REQUIRE(mp.endpoint_phi.has_value());
  CHECK(*mp.endpoint_phi < 0);
  CHECK(mp.verdict == SolveVerdict::Converged);
  CHECK(mp.phi > 0);
  CHECK(std::abs(mp.phi - neh.phi) <= 2e-3 * neh.phi);
  for (const auto& row : mp.trace) CHECK(row.defect <= cfg.sym_tol);
}

TEST_CASE("critical family stays below the compactness threshold") {
  const Grid g(6.0, 48);
  const Model model = critical_model(g);
  SolveConfig cfg;
  const SolveReport rep = nehari_minimize(cfg, model, SymmetryGroup::dihedral(4));
  REQUIRE(rep.verdict == SolveVerdict::Converged);
  CHECK(rep.phi > 0);
  CHECK(rep.phi < 0.5);
  CHECK(rep.norm_sq < 1.0);
}

TEST_CASE("file initial field round trip") {
  const Grid g(3.0, 16);
  const Model model = power_model(g);
  const auto G = SymmetryGroup::rotation(4);
  const Field ring = initial_field(SolveConfig{}, model, G);
  const auto path = std::filesystem::temp_directory_path() / "logsp_solver_field.csv";
  {
    std::ofstream os(path);
    write_field_csv(os, ring);
  }
  SolveConfig cfg;
  cfg.init = InitKind::File;
  cfg.init_file = path.string();
  const Field back = initial_field(cfg, model, G);
  CHECK((back.values() - ring.values()).abs().maxCoeff() <= 1e-15);
  CHECK_THROWS_AS(read_field_csv(path.string(), Grid(3.0, 32)), std::invalid_argument);
  std::filesystem::remove(path);
}
