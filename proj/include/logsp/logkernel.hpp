#pragma once

// Logarithmic convolution kernels and the bilinear forms built on them:
//   A1 ~ ln(1 + r),  A2 ~ ln(1 + 1/r),  A0 ~ ln r = A1 - A2,  G_alpha ~ (r^-alpha - 1)/alpha.

#include "logsp/grid.hpp"
#include "logsp/symmetry.hpp"

#include <complex>
#include <memory>
#include <string>

namespace logsp {

enum class KernelKind { LogOnePlusR, LogOnePlusInvR, LogR, GAlpha };

std::string to_string(KernelKind kind);

enum class EvalPath { Fast, Direct };

/// Pointwise kernel K(r) for r > 0.
double kernel_value(KernelKind kind, double r, double alpha = 0.0);

/// Average of K(|x|) over the h x h cell centered at the origin.
double kernel_cell_average(KernelKind kind, double h, double alpha = 0.0);

/// Closed form of the cell average of ln|x| over an h x h square.
double log_cell_average_closed_form(double h);

/// Immutable kernel table on the difference lattice plus its spectrum on the
/// zero-padded 2N x 2N torus. convolve(w)(x_i) = h^2 sum_j K(x_i - x_j) w_j.
class ConvolutionPlan {
 public:
  ConvolutionPlan(const Grid& grid, KernelKind kind, double alpha = 0.0, double sign = 1.0);

  const Grid& grid() const { return grid_; }
  KernelKind kind() const { return kind_; }
  double alpha() const { return alpha_; }

  /// K at lattice offset (di, dj), |di|, |dj| < N; the origin holds the cell average.
  double kernel_at(Index di, Index dj) const {
    return table_(di < 0 ? -di : di, dj < 0 ? -dj : dj);
  }

  FieldArray<double> convolve(const FieldArray<double>& w) const;
  FieldArray<double> convolve_direct(const FieldArray<double>& w) const;

 private:
  Grid grid_;
  KernelKind kind_;
  double alpha_;
  FieldArray<double> table_;  // N x N, indexed by |offset|
  std::shared_ptr<const Eigen::ArrayXXcd> spectrum_;
};

/// h^4 sum_ij K(x_i - x_j) w1_i w2_j
double bilinear_A(const ConvolutionPlan& plan, const Field& w1, const Field& w2,
                  EvalPath path = EvalPath::Fast);

/// The three log plans on one grid. `flip_a2_sign` is a test hook that corrupts
/// A2 so identity checks can be exercised on a broken kernel.
class LogKernelSet {
 public:
  explicit LogKernelSet(const Grid& grid, bool flip_a2_sign = false);

  const Grid& grid() const { return a0_.grid(); }
  const ConvolutionPlan& a0() const { return a0_; }
  const ConvolutionPlan& a1() const { return a1_; }
  const ConvolutionPlan& a2() const { return a2_; }
  const ConvolutionPlan& operator[](int which) const;

 private:
  ConvolutionPlan a0_, a1_, a2_;
};

/// I_i(u) = A_i(|u|^p, |u|^p), the kernel chosen by the plan.
double functional_I(const ConvolutionPlan& plan, const Field& u, double p,
                    EvalPath path = EvalPath::Fast);
double functional_I(const LogKernelSet& kernels, const Field& u, double p, int which,
                    EvalPath path = EvalPath::Fast);

/// phi_u = (1/2pi) ln|.| * |u|^p. Requires a LogR plan.
Field newton_potential(const ConvolutionPlan& plan, const Field& u, double p);

/// |I2(u)| / ||u||_{4p/3}^{2p}
double hls_ratio(const ConvolutionPlan& a2_plan, const Field& u, double p);

struct CoercivityResult {
  double ratio = 0;
  double defect_u = 0;
  double defect_v = 0;
  bool exact_group = true;
};

/// A1(|u|^p, |v|^p) / (||u||_*^p ||v||_p^p) for G-invariant u, v.
CoercivityResult coercivity_ratio(const ConvolutionPlan& a1_plan, const Field& u, const Field& v,
                                  double p, const SymmetryGroup& group, double sym_tol = 1e-10,
                                  EvalPath path = EvalPath::Fast);

/// (r^-alpha - 1) / alpha
double g_alpha_kernel(double r, double alpha);

}  // namespace logsp
