#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "logsp/fields.hpp"
#include "logsp/nonlinearity.hpp"
#include "logsp/quadrature.hpp"

#include <cmath>
#include <numbers>

using namespace logsp;

namespace {

constexpr double kAlpha0 = 4.0 * std::numbers::pi;

std::vector<Nonlinearity> builtin_families() {
  return {Nonlinearity::critical_exp(1.0, kAlpha0), Nonlinearity::subcritical_power(1.0, 4.0),
          Nonlinearity::subcritical_power(2.0, 6.0), Nonlinearity::subcritical_exp(0.5, 2.0, 1.5)};
}

}  // namespace

TEST_CASE("closed forms") {
  const auto c = Nonlinearity::critical_exp(1.0, kAlpha0);
  CHECK(c.f(0.0) == 0.0);
  CHECK(c.F(0.0) == 0.0);
  const double t = 0.7, h = 1e-6;
  const double fd = (c.F(t + h) - c.F(t - h)) / (2 * h);
  CHECK(fd == doctest::Approx(c.f(t)).epsilon(1e-6));
  const auto pw = Nonlinearity::subcritical_power(1.0, 4.0);
  CHECK(pw.f(2.0) == 8.0);
  CHECK(pw.F(2.0) == 4.0);
  CHECK(pw.f(-2.0) == -8.0);
  CHECK_THROWS(Nonlinearity::critical_exp(-1.0, kAlpha0));
  CHECK_THROWS(Nonlinearity::subcritical_power(1.0, 1.0));
}

TEST_CASE("primitive matches quadrature of f") {
  const GaussRule rule = gauss_legendre(20);
  Rng rng(31);
  for (const auto& nl : builtin_families()) {
    for (int s = 0; s < 1000; ++s) {
      const double t = rng.uniform(-1.5, 1.5);
      const double q = integrate_composite([&](double x) { return nl.f(x); }, 0.0, t, 16, rule);
      CHECK(std::abs(nl.F(t) - q) <= 1e-8 * (1 + std::abs(nl.F(t))));
      CHECK(nl.f(t) * t >= 0.0);
    }
  }
}

TEST_CASE("log-space evaluation") {
  const auto c = Nonlinearity::critical_exp(1.0, kAlpha0);
  for (double t : {0.01, 0.3, 1.0, 2.0}) {
    CHECK(c.log_F(t) == doctest::Approx(std::log(c.F(t))).epsilon(1e-10));
    CHECK(c.log_abs_f(t) == doctest::Approx(std::log(c.f(t))).epsilon(1e-10));
  }
  CHECK(std::isfinite(c.log_F(50.0)));
}

TEST_CASE("growth tag of the critical family") {
  const auto c = Nonlinearity::critical_exp(1.0, kAlpha0);
  const double t = 10.0;
  CHECK(std::exp(c.log_abs_f(t) - 1.2 * kAlpha0 * t * t) < 1e-6);
  CHECK(std::exp(c.log_abs_f(t) - 0.8 * kAlpha0 * t * t) > 1e6);
  const auto rep = check_condition(c, Potential::constant(1.0), ConditionId::F1, {});
  CHECK(rep.verdict == Verdict::Pass);
}

TEST_CASE("structure conditions") {
  const Potential V = Potential::constant(1.0);
  const auto c = Nonlinearity::critical_exp(1.0, kAlpha0);
  CheckParams params;
  params.t_max = 3.0;

  SUBCASE("critical family satisfies the AR-type bound with mu1 = 4") {
    params.mu1 = 4.0;
    params.mu2 = 0.0;
    CHECK(check_condition(c, V, ConditionId::F4, params).verdict == Verdict::Pass);
    // Oracle: f t - 4F = (lambda/alpha0) [(s - 2) e^s + s + 2] with s = alpha0 t^2.
    for (double t : {0.1, 0.5, 1.0}) {
      const double s = kAlpha0 * t * t;
      const double closed = ((s - 2) * std::exp(s) + s + 2) / kAlpha0;
      CHECK(c.f(t) * t - 4.0 * c.F(t) == doctest::Approx(closed).epsilon(1e-9));
    }
  }
  SUBCASE("power family is an equality case of the threshold AR bound") {
    params.mu = 4.0;
    const auto rep = check_condition(Nonlinearity::subcritical_power(1.0, 4.0), V, ConditionId::F4PrimeAR, params);
    CHECK(rep.verdict != Verdict::Fail);
  }
  SUBCASE("power family below 2p breaks monotonicity") {
    params.p = 2.0;
    params.mu = 1.0;
    const auto rep = check_condition(Nonlinearity::subcritical_power(1.0, 3.0), V, ConditionId::F4PrimeMono, params);
    CHECK(rep.verdict == Verdict::Fail);
    REQUIRE_FALSE(rep.witnesses.empty());
    CHECK(rep.witnesses.front().violation > params.check_tol);
  }
  SUBCASE("monotone families") {
    params.p = 2.0;
    params.mu = 1.0;
    CHECK(check_condition(Nonlinearity::subcritical_power(1.0, 4.0), V, ConditionId::F4PrimeMono, params).verdict != Verdict::Fail);
    CHECK(check_condition(c, V, ConditionId::F4PrimeMono, params).verdict != Verdict::Fail);
  }
  SUBCASE("sign and domination") {
    for (const auto& nl : builtin_families()) {
      CHECK(check_condition(nl, V, ConditionId::F2, params).verdict != Verdict::Fail);
      CHECK(check_condition(nl, V, ConditionId::F5, params).verdict != Verdict::Fail);
    }
    const auto linear = Nonlinearity::user([](const Point&, double t) { return 0.5 * t; },
                                           [](const Point&, double t) { return 0.25 * t * t; }, "linear");
    CHECK(check_condition(linear, V, ConditionId::F5, params).verdict == Verdict::Fail);
  }
  SUBCASE("Moser growth condition") {
    params.q = 2.0;
    CHECK(check_condition(c, V, ConditionId::F3, params).verdict == Verdict::Pass);
  }
  SUBCASE("potential coercivity") {
    CHECK(check_condition(c, V, ConditionId::V0, params).verdict == Verdict::Pass);
    CHECK(check_condition(c, Potential::constant(0.0), ConditionId::V0, params).verdict == Verdict::Fail);
  }
}

TEST_CASE("condition names round trip") {
  for (ConditionId id : {ConditionId::V0, ConditionId::F1, ConditionId::F2, ConditionId::F3, ConditionId::F4,
                         ConditionId::F5, ConditionId::F4PrimeMono, ConditionId::F4PrimeAR}) {
    CHECK(condition_from_string(to_string(id)) == id);
  }
  CHECK(to_string(ConditionId::F4PrimeMono) == "F4prime_mono");
  CHECK_FALSE(condition_from_string("F9").has_value());
}

TEST_CASE("gamma estimate") {
  const Grid g(4.0, 64);
  const auto one = estimate_gamma(Potential::constant(1.0), g, 20, 3);
  CHECK(one.estimate == doctest::Approx(1.0).epsilon(1e-12));
  const auto four = estimate_gamma(Potential::constant(4.0), g, 20, 3);
  CHECK(four.estimate >= 1.0);
  CHECK(four.estimate <= 2.0);
  REQUIRE(four.analytic_floor.has_value());
  CHECK(*four.analytic_floor == 1.0);
  const auto quarter = estimate_gamma(Potential::constant(0.25), g, 20, 3);
  CHECK(quarter.estimate >= 0.5);
}

TEST_CASE("sup of F over t^2") {
  const auto pw = Nonlinearity::subcritical_power(1.0, 4.0);
  for (double t1 : {0.5, 1.0, 2.0}) CHECK(m_t1(pw, t1) == doctest::Approx(t1 * t1 / 4).epsilon(1e-12));
  CHECK(m_t1(pw, 1e-3) < 1e-6);
  CHECK(std::isfinite(m_t1(Nonlinearity::critical_exp(1.0, kAlpha0), 1.0)));
}
