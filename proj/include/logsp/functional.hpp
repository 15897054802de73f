#pragma once

// Energy Phi(u) = 1/2 ||u||^2 + (1/(4 p pi)) I0(u) - int F(x, u), its derivative,
// and the inequality machinery evaluated on grid fields.

#include "logsp/grid.hpp"
#include "logsp/logkernel.hpp"
#include "logsp/nonlinearity.hpp"
#include "logsp/potential.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace logsp {

/// Everything Phi depends on, with the kernel plans built once. Cheap to copy.
class Model {
 public:
  Model(const Grid& grid, Potential potential, Nonlinearity nl, double p, bool flip_a2_sign = false);

  const Grid& grid() const { return grid_; }
  const Potential& potential() const { return potential_; }
  const Field& V() const { return v_; }
  const Nonlinearity& nonlinearity() const { return nl_; }
  double p() const { return p_; }
  const LogKernelSet& kernels() const { return *kernels_; }

  /// Same physics on another grid (kernels rebuilt).
  Model on_grid(const Grid& grid) const;

 private:
  Grid grid_;
  Potential potential_;
  Field v_;
  Nonlinearity nl_;
  double p_;
  bool flip_a2_sign_;
  std::shared_ptr<const LogKernelSet> kernels_;
};

struct EnergyBreakdown {
  double quadratic = 0;       // 1/2 ||u||^2
  double nonlocal = 0;        // I0(u) / (4 p pi)
  double potential_term = 0;  // int F(x, u)
  double total = 0;           // quadratic + nonlocal - potential_term
};

EnergyBreakdown energy(const Field& u, const Model& model);

/// L^2 representer g of Phi'(u): integrate(g v) = <Phi'(u), v> for every grid field v.
Field gradient(const Field& u, const Model& model);

/// <Phi'(u), v>
double derivative(const Field& u, const Field& v, const Model& model);

/// <Phi'(u), u> = ||u||^2 + I0(u)/(2 pi) - int f(x, u) u
double nehari_value(const Field& u, const Model& model);

struct CeramiDiagnostic {
  double phi = 0;
  double residual = 0;  // ||g||_2 (1 + ||u|| + ||u||_*)
  int iteration = 0;
};

CeramiDiagnostic residual(const Field& u, const Model& model, int iteration = 0);
double residual_from_gradient(const Field& u, const Field& g, const Model& model);

/// Phi along the ray t -> t u with the t-independent pieces cached.
class RayProfile {
 public:
  RayProfile(const Field& u, const Model& model);

  double phi(double t) const;
  /// d/dt Phi(t u) = <Phi'(t u), u>
  double dphi(double t) const;
  double norm_sq() const { return norm_sq_; }
  double i0() const { return i0_; }

 private:
  const Model* model_;
  Field u_;
  double norm_sq_;
  double i0_;
};

/// g(t) = t^{2p} - p t^2 + p - 1
double g_poly(double t, double p);

/// Phi(u) - Phi(t u) - ((1 - t^{2p})/2p) <Phi'(u),u> - (g(t)/2p) ||u||^2
double fiber_gap(const Field& u, double t, const Model& model);

/// Phi(u) - l0 <Phi'(u),u> - (1/2 - mu2/mu1 - l0) ||u||^2 - (l0 - 1/mu1) int f(x,u) u
double ar_combo_bound(const Field& u, const Model& model, double lambda0, double mu1, double mu2);

/// (1/2p) f t - F - mu (1 - p) V t^2 / 2p, pointwise
double eq55_gap(const Nonlinearity& nl, double v, const Point& x, double t, double p, double mu);

struct SmallBallFit {
  double c3 = 0;
  double c4 = 0;
  double radius_limit = 0;  // sqrt(pi/alpha0), or +inf without a critical exponent
  std::vector<std::pair<double, double>> sweep;  // (||c u0||, Phi(c u0))
};

/// Calibrates Phi(u) >= 1/4 ||u||^2 - C3 ||u||^3 - C4 ||u||^{2p} on the ray through u0.
/// C3 comes from the lower half of the sweep, C4 then absorbs the rest.
SmallBallFit fit_small_ball(const Field& u0, const Model& model, int samples = 40);

struct SmallBallBound {
  double lhs = 0;  // Phi(u)
  double rhs = 0;  // 1/4 r^2 - C3 r^3 - C4 r^{2p}
};

SmallBallBound small_ball_bound(const Field& u, const Model& model, const SmallBallFit& fit);

}  // namespace logsp
