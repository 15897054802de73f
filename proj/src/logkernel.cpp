#include "logsp/logkernel.hpp"

#include "logsp/parallel.hpp"
#include "logsp/quadrature.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace logsp {

namespace {

// Column transforms are limited to the first `cols` columns: on the way in the
// rest are zero padding, on the way out they are discarded.
void fft2_forward(Eigen::ArrayXXcd& data, Index cols) {
  Eigen::FFT<double> fft;
  const Index rows = data.rows();
  Eigen::VectorXcd in(rows), out(rows);
  for (Index c = 0; c < cols; ++c) {
    in = data.col(c).matrix();
    fft.fwd(out, in);
    data.col(c) = out.array();
  }
  in.resize(data.cols());
  out.resize(data.cols());
  for (Index r = 0; r < rows; ++r) {
    in = data.row(r).transpose().matrix();
    fft.fwd(out, in);
    data.row(r) = out.array().transpose();
  }
}

void fft2_inverse(Eigen::ArrayXXcd& data, Index cols) {
  Eigen::FFT<double> fft;
  const Index rows = data.rows();
  Eigen::VectorXcd in(data.cols()), out(data.cols());
  for (Index r = 0; r < rows; ++r) {
    in = data.row(r).transpose().matrix();
    fft.inv(out, in);
    data.row(r) = out.array().transpose();
  }
  in.resize(rows);
  out.resize(rows);
  for (Index c = 0; c < cols; ++c) {
    in = data.col(c).matrix();
    fft.inv(out, in);
    data.col(c) = out.array();
  }
}

// (1/h^2) * 8 * int_0^{pi/4} int_0^{R(theta)} K(r) r dr dtheta, R = (h/2)/cos(theta).
template <typename Inner>
double square_average(double h, Inner&& inner) {
  static const GaussRule rule = gauss_legendre(48);
  const double a = 0.5 * h;
  const double quarter = 0.25 * std::numbers::pi;
  const double s = integrate_composite(
      [&](double theta) { return inner(a / std::cos(theta)); }, 0.0, quarter, 4, rule);
  return 8.0 * s / (h * h);
}

double inner_log(double R) { return 0.5 * R * R * std::log(R) - 0.25 * R * R; }

double inner_log1p(double R) {
  return 0.5 * (R * R - 1.0) * std::log1p(R) - 0.25 * R * R + 0.5 * R;
}

void check_fields(const ConvolutionPlan& plan, const Field& w1, const Field& w2) {
  if (w1.grid() != plan.grid() || w2.grid() != plan.grid()) {
    throw std::invalid_argument("bilinear_A: grid mismatch");
  }
  if (!w1.all_finite() || !w2.all_finite()) {
    throw std::domain_error("bilinear_A: non-finite field value");
  }
}

FieldArray<double> abs_pow(const Field& u, double p) { return u.values().abs().pow(p); }

}  // namespace

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::LogOnePlusR: return "ln(1+r)";
    case KernelKind::LogOnePlusInvR: return "ln(1+1/r)";
    case KernelKind::LogR: return "ln(r)";
    case KernelKind::GAlpha: return "G_alpha";
  }
  return "?";
}

double g_alpha_kernel(double r, double alpha) {
  if (!(r > 0)) throw std::domain_error("g_alpha_kernel: r must be positive");
  if (!(alpha > 0 && alpha < 1)) throw std::domain_error("g_alpha_kernel: alpha must be in (0,1)");
  // expm1 keeps (r^-a - 1)/a accurate for small a.
  return std::expm1(-alpha * std::log(r)) / alpha;
}

double kernel_value(KernelKind kind, double r, double alpha) {
  switch (kind) {
    case KernelKind::LogOnePlusR: return std::log1p(r);
    case KernelKind::LogOnePlusInvR: return std::log1p(1.0 / r);
    case KernelKind::LogR: return std::log(r);
    case KernelKind::GAlpha: return g_alpha_kernel(r, alpha);
  }
  return 0.0;
}

double log_cell_average_closed_form(double h) {
  const double a = 0.5 * h;
  return std::log(a) + 0.5 * std::log(2.0) - 1.5 + 0.25 * std::numbers::pi;
}

double kernel_cell_average(KernelKind kind, double h, double alpha) {
  switch (kind) {
    case KernelKind::LogR:
      return square_average(h, inner_log);
    case KernelKind::LogOnePlusR:
      return square_average(h, inner_log1p);
    case KernelKind::LogOnePlusInvR:
      return square_average(h, [](double R) { return inner_log1p(R) - inner_log(R); });
    case KernelKind::GAlpha: {
      if (!(alpha > 0 && alpha < 1)) throw std::domain_error("G_alpha: alpha must be in (0,1)");
      return square_average(h, [alpha](double R) {
        return (std::pow(R, 2.0 - alpha) / (2.0 - alpha) - 0.5 * R * R) / alpha;
      });
    }
  }
  return 0.0;
}

ConvolutionPlan::ConvolutionPlan(const Grid& grid, KernelKind kind, double alpha, double sign)
    : grid_(grid), kind_(kind), alpha_(alpha) {
  if (kind == KernelKind::GAlpha && !(alpha > 0 && alpha < 1)) {
    throw std::invalid_argument("ConvolutionPlan: G_alpha needs alpha in (0,1)");
  }
  const Index n = grid.size();
  const double h = grid.spacing();
  table_.resize(n, n);
  for (Index dj = 0; dj < n; ++dj) {
    for (Index di = 0; di < n; ++di) {
      table_(di, dj) = (di == 0 && dj == 0)
                           ? kernel_cell_average(kind, h, alpha)
                           : kernel_value(kind, h * std::hypot(double(di), double(dj)), alpha);
    }
  }
  table_ *= sign;

  const Index m = 2 * n;
  Eigen::ArrayXXcd padded = Eigen::ArrayXXcd::Zero(m, m);
  for (Index b = 0; b < m; ++b) {
    if (b == n) continue;
    const Index db = b < n ? b : m - b;
    for (Index a = 0; a < m; ++a) {
      if (a == n) continue;
      const Index da = a < n ? a : m - a;
      padded(a, b) = table_(da, db);
    }
  }
  fft2_forward(padded, m);
  spectrum_ = std::make_shared<const Eigen::ArrayXXcd>(std::move(padded));
}

FieldArray<double> ConvolutionPlan::convolve(const FieldArray<double>& w) const {
  const Index n = grid_.size();
  if (w.rows() != n || w.cols() != n) throw std::invalid_argument("convolve: shape mismatch");
  const Index m = 2 * n;
  Eigen::ArrayXXcd work = Eigen::ArrayXXcd::Zero(m, m);
  work.topLeftCorner(n, n) = w.cast<std::complex<double>>();
  fft2_forward(work, n);
  work *= *spectrum_;
  fft2_inverse(work, n);
  return grid_.cell_area() * work.topLeftCorner(n, n).real();
}

FieldArray<double> ConvolutionPlan::convolve_direct(const FieldArray<double>& w) const {
  const Index n = grid_.size();
  if (w.rows() != n || w.cols() != n) throw std::invalid_argument("convolve: shape mismatch");
  FieldArray<double> out(n, n);
  parallel_for(0, long(n), [&](long jl) {
    const Index j = Index(jl);
    for (Index i = 0; i < n; ++i) {
      double acc = 0;
      for (Index l = 0; l < n; ++l) {
        const Index dl = j > l ? j - l : l - j;
        for (Index k = 0; k < n; ++k) {
          const Index dk = i > k ? i - k : k - i;
          acc += table_(dk, dl) * w(k, l);
        }
      }
      out(i, j) = grid_.cell_area() * acc;
    }
  });
  return out;
}

double bilinear_A(const ConvolutionPlan& plan, const Field& w1, const Field& w2, EvalPath path) {
  check_fields(plan, w1, w2);
  const FieldArray<double> conv =
      path == EvalPath::Fast ? plan.convolve(w2.values()) : plan.convolve_direct(w2.values());
  return plan.grid().cell_area() * (w1.values() * conv).sum();
}

LogKernelSet::LogKernelSet(const Grid& grid, bool flip_a2_sign)
    : a0_(grid, KernelKind::LogR),
      a1_(grid, KernelKind::LogOnePlusR),
      a2_(grid, KernelKind::LogOnePlusInvR, 0.0, flip_a2_sign ? -1.0 : 1.0) {}

const ConvolutionPlan& LogKernelSet::operator[](int which) const {
  switch (which) {
    case 0: return a0_;
    case 1: return a1_;
    case 2: return a2_;
    default: throw std::out_of_range("LogKernelSet: which must be 0, 1 or 2");
  }
}

double functional_I(const ConvolutionPlan& plan, const Field& u, double p, EvalPath path) {
  if (p < 2) throw std::invalid_argument("functional_I: p must be >= 2");
  const Field w(u.grid(), abs_pow(u, p));
  return bilinear_A(plan, w, w, path);
}

double functional_I(const LogKernelSet& kernels, const Field& u, double p, int which,
                    EvalPath path) {
  return functional_I(kernels[which], u, p, path);
}

Field newton_potential(const ConvolutionPlan& plan, const Field& u, double p) {
  if (plan.kind() != KernelKind::LogR) {
    throw std::invalid_argument("newton_potential: plan must use the ln r kernel");
  }
  if (p < 2) throw std::invalid_argument("newton_potential: p must be >= 2");
  if (u.grid() != plan.grid()) throw std::invalid_argument("newton_potential: grid mismatch");
  if (!u.all_finite()) throw std::domain_error("newton_potential: non-finite field value");
  return Field(u.grid(), plan.convolve(abs_pow(u, p)) / (2.0 * std::numbers::pi));
}

double hls_ratio(const ConvolutionPlan& a2_plan, const Field& u, double p) {
  const double denom = std::pow(norm_Lq(u, 4.0 * p / 3.0), 2.0 * p);
  if (!(denom > 0)) throw std::invalid_argument("hls_ratio: zero field");
  return std::abs(functional_I(a2_plan, u, p)) / denom;
}

CoercivityResult coercivity_ratio(const ConvolutionPlan& a1_plan, const Field& u, const Field& v,
                                  double p, const SymmetryGroup& group, double sym_tol,
                                  EvalPath path) {
  CoercivityResult out;
  out.exact_group = group.exact_on_grid();
  out.defect_u = symmetry_defect(group, u);
  out.defect_v = symmetry_defect(group, v);
  if (out.defect_u > sym_tol || out.defect_v > sym_tol) {
    throw std::invalid_argument("coercivity_ratio: inputs are not group invariant");
  }
  const double nu = std::pow(norm_star(u, p), p);
  const double nv = std::pow(norm_Lq(v, p), p);
  if (!(nu > 0) || !(nv > 0)) throw std::invalid_argument("coercivity_ratio: zero field");
  const Field wu(u.grid(), abs_pow(u, p));
  const Field wv(v.grid(), abs_pow(v, p));
  out.ratio = bilinear_A(a1_plan, wu, wv, path) / (nu * nv);
  return out;
}

}  // namespace logsp
