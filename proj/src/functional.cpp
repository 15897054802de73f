#include "logsp/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace logsp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_model_grid(const Field& u, const Model& model) {
  if (u.grid() != model.grid()) throw std::invalid_argument("field grid does not match model");
  if (!u.all_finite()) throw std::domain_error("non-finite field value");
}

// |u|^{p-2} u, zero at u = 0.
FieldArray<double> signed_pow(const FieldArray<double>& u, double p) {
  if (p == 2.0) return u;
  return u.abs().pow(p - 2.0) * u;
}

}  // namespace

Model::Model(const Grid& grid, Potential potential, Nonlinearity nl, double p, bool flip_a2_sign)
    : grid_(grid),
      potential_(std::move(potential)),
      v_(potential_.sample(grid)),
      nl_(std::move(nl)),
      p_(p),
      flip_a2_sign_(flip_a2_sign),
      kernels_(std::make_shared<const LogKernelSet>(grid, flip_a2_sign)) {
  if (p < 2) throw std::invalid_argument("model: p must be >= 2");
}

Model Model::on_grid(const Grid& grid) const {
  return Model(grid, potential_, nl_, p_, flip_a2_sign_);
}

EnergyBreakdown energy(const Field& u, const Model& model) {
  require_model_grid(u, model);
  EnergyBreakdown e;
  e.quadratic = 0.5 * norm_H_squared(u, model.V());
  e.nonlocal = functional_I(model.kernels().a0(), u, model.p()) / (4.0 * model.p() * std::numbers::pi);
  e.potential_term = integrate(model.grid(), model.nonlinearity().apply_F(u));
  e.total = e.quadratic + e.nonlocal - e.potential_term;
  return e;
}

Field gradient(const Field& u, const Model& model) {
  require_model_grid(u, model);
  const double p = model.p();
  const FieldArray<double> rho = u.values().abs().pow(p);
  const FieldArray<double> phi = model.kernels().a0().convolve(rho) / kTwoPi;
  FieldArray<double> g = neg_laplacian(u) + model.V().values() * u.values() +
                         phi * signed_pow(u.values(), p) - model.nonlinearity().apply_f(u);
  return Field(u.grid(), std::move(g));
}

double derivative(const Field& u, const Field& v, const Model& model) {
  const Field g = gradient(u, model);
  return integrate(model.grid(), g.values() * v.values());
}

double nehari_value(const Field& u, const Model& model) {
  require_model_grid(u, model);
  const double i0 = functional_I(model.kernels().a0(), u, model.p());
  return norm_H_squared(u, model.V()) + i0 / kTwoPi -
         integrate(model.grid(), model.nonlinearity().apply_f(u) * u.values());
}

double residual_from_gradient(const Field& u, const Field& g, const Model& model) {
  const double g2 = std::sqrt(integrate(model.grid(), g.values().square()));
  return g2 * (1.0 + norm_H(u, model.V()) + norm_star(u, model.p()));
}

CeramiDiagnostic residual(const Field& u, const Model& model, int iteration) {
  CeramiDiagnostic d;
  d.iteration = iteration;
  d.phi = energy(u, model).total;
  d.residual = residual_from_gradient(u, gradient(u, model), model);
  return d;
}

RayProfile::RayProfile(const Field& u, const Model& model)
    : model_(&model),
      u_(u),
      norm_sq_(norm_H_squared(u, model.V())),
      i0_(functional_I(model.kernels().a0(), u, model.p())) {
  require_model_grid(u, model);
}

double RayProfile::phi(double t) const {
  const double p = model_->p();
  const Field tu = t * u_;
  const double pot = integrate(model_->grid(), model_->nonlinearity().apply_F(tu));
  return 0.5 * t * t * norm_sq_ + std::pow(t, 2.0 * p) * i0_ / (4.0 * p * std::numbers::pi) - pot;
}

double RayProfile::dphi(double t) const {
  const double p = model_->p();
  const Field tu = t * u_;
  const double work = integrate(model_->grid(), model_->nonlinearity().apply_f(tu) * u_.values());
  return t * norm_sq_ + std::pow(t, 2.0 * p - 1.0) * i0_ / kTwoPi - work;
}

double g_poly(double t, double p) { return std::pow(t, 2.0 * p) - p * t * t + p - 1.0; }

double fiber_gap(const Field& u, double t, const Model& model) {
  if (t < 0) throw std::invalid_argument("fiber_gap: t must be >= 0");
  const double p = model.p();
  const RayProfile ray(u, model);
  const double nehari = ray.dphi(1.0);
  return ray.phi(1.0) - ray.phi(t) - (1.0 - std::pow(t, 2.0 * p)) / (2.0 * p) * nehari -
         g_poly(t, p) / (2.0 * p) * ray.norm_sq();
}

double ar_combo_bound(const Field& u, const Model& model, double lambda0, double mu1, double mu2) {
  const double lo = 1.0 / mu1;
  const double hi = 0.5 - mu2 / mu1;
  if (!(lambda0 > lo && lambda0 < hi)) {
    throw std::invalid_argument("ar_combo_bound: lambda0 outside (1/mu1, 1/2 - mu2/mu1)");
  }
  const EnergyBreakdown e = energy(u, model);
  const double norm_sq = 2.0 * e.quadratic;
  const double work = integrate(model.grid(), model.nonlinearity().apply_f(u) * u.values());
  const double nehari = nehari_value(u, model);
  return e.total - lambda0 * nehari - (0.5 - mu2 / mu1 - lambda0) * norm_sq - (lambda0 - 1.0 / mu1) * work;
}

double eq55_gap(const Nonlinearity& nl, double v, const Point& x, double t, double p, double mu) {
  if (p < 2) throw std::invalid_argument("eq55_gap: p must be >= 2");
  const double lhs = nl.f(x, t) * t / (2.0 * p) - nl.F(x, t);
  const double rhs = mu * (1.0 - p) / (2.0 * p) * v * t * t;
  return lhs - rhs;
}

SmallBallFit fit_small_ball(const Field& u0, const Model& model, int samples) {
  if (samples < 4) throw std::invalid_argument("fit_small_ball: need at least 4 samples");
  SmallBallFit fit;
  const auto a0 = model.nonlinearity().critical_exponent();
  fit.radius_limit = a0 ? std::sqrt(std::numbers::pi / *a0) : std::numeric_limits<double>::infinity();
  const RayProfile ray(u0, model);
  const double base = std::sqrt(ray.norm_sq());
  if (!(base > 0)) throw std::invalid_argument("fit_small_ball: zero direction");
  const double r_max = std::isfinite(fit.radius_limit) ? fit.radius_limit : 1.0;
  for (int s = 1; s <= samples; ++s) {
    const double r = r_max * s / samples;
    fit.sweep.emplace_back(r, ray.phi(r / base));
  }
  const double p = model.p();
  for (int s = 0; s < samples / 2; ++s) {
    const auto [r, phi] = fit.sweep[s];
    fit.c3 = std::max(fit.c3, (0.25 * r * r - phi) / (r * r * r));
  }
  for (const auto& [r, phi] : fit.sweep) {
    fit.c4 = std::max(fit.c4, (0.25 * r * r - fit.c3 * r * r * r - phi) / std::pow(r, 2.0 * p));
  }
  return fit;
}

SmallBallBound small_ball_bound(const Field& u, const Model& model, const SmallBallFit& fit) {
  const double r = norm_H(u, model.V());
  if (r > fit.radius_limit) throw std::domain_error("small_ball_bound: ||u|| outside the small ball");
  SmallBallBound b;
  b.lhs = energy(u, model).total;
  b.rhs = 0.25 * r * r - fit.c3 * r * r * r - fit.c4 * std::pow(r, 2.0 * model.p());
  return b;
}

}  // namespace logsp
