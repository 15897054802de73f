#pragma once

// Moser-type concentrating functions omega_n and the threshold certificate
// max_t Phi(t omega_n) < 2 pi / alpha0.

#include "logsp/functional.hpp"
#include "logsp/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace logsp {

/// omega_n(r) = plateau for r <= r_in, ln(1/r)/sqrt(2 pi ln n) for r_in < r < 1, 0 beyond.
struct MoserProfile {
  double n = 0;
  double q = 2;
  double ln_n = 0;
  double r_in = 0;
  double s_in = 0;     // ln(1/r_in)
  double plateau = 0;
  double slope = 0;    // 1/sqrt(2 pi ln n), omega = slope * ln(1/r) on the annulus

  double operator()(double r) const;
};

/// Throws std::domain_error when r_in >= 1.
MoserProfile moser_profile(double n, double q);

struct MoserFunction {
  MoserProfile profile;
  Field field;
  bool resolved = false;  // h < r_in / 2
  std::string warning;
};

MoserFunction build_moser(double n, double q, const Grid& grid);

struct MoserGradNorm {
  double analytic = 0;  // 1 - q ln(ln n) / (2 ln n)
  double radial = 0;    // radial finite differences on a geometric mesh
  std::optional<double> grid_value;
  bool grid_agrees = false;  // grid value within 1e-2 relative of the radial one
};

/// Analytic and radial values; pass a grid to also report the 2-D finite difference value.
MoserGradNorm moser_grad_norm_sq(double n, double q, const Grid* grid = nullptr);

/// delta_n = int_{B_1} omega_n^2
double moser_delta(const MoserProfile& w);

/// Phi(t omega_n) by radial quadrature. The potential enters through its angular average,
/// and the nonlinearity must be autonomous.
class MoserRay {
 public:
  MoserRay(const MoserProfile& w, const Model& model);

  double phi(double t) const;
  double grad_norm_sq() const { return grad_; }
  double potential_mass() const { return vmass_; }  // int V omega^2
  double i0() const { return i0_; }

 private:
  MoserProfile w_;
  const Model* model_;
  double grad_ = 0;
  double vmass_ = 0;
  double i0_ = 0;
  std::vector<double> s_nodes_;    // annulus nodes in s = ln(1/r)
  std::vector<double> s_weights_;  // include the 2 pi e^{-2s} area factor as a log below
};

/// T_n = ln n - q ln(ln n) + q^2 ln^2(ln n) / (4 ln n)
double moser_T(double n, double q);

/// Upper envelope phi_n(t) on the window sqrt(3 pi/alpha0) <= t <= sqrt(8 pi/alpha0).
double case2_envelope(double n, double q, double t, const Model& model);

struct RayMaximum {
  double t = 0;
  double phi = 0;
};

/// Log grid t in [1e-3, 1e2] (200 points) refined by golden section to 1e-8 in t.
RayMaximum maximize_moser_ray(const MoserRay& ray);

struct MoserEntry {
  double n = 0;
  std::optional<double> grad_norm_sq;
  std::optional<double> delta_n;
  std::optional<double> max_t_phi;
  std::optional<double> t_max;
  bool pass = false;
  std::string error;
};

struct ThresholdCertificate {
  double threshold = 0;  // 2 pi / alpha0
  double margin = 0;
  std::vector<MoserEntry> entries;
  std::optional<double> n0;
  std::optional<double> certified_max;
};

ThresholdCertificate threshold_certificate(const std::vector<double>& n_list, double q,
                                           const Model& model, double margin = 1e-3);

}  // namespace logsp
