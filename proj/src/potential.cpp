#include "logsp/potential.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace logsp {

Potential Potential::constant(double v0) {
  if (!(v0 >= 0) || !std::isfinite(v0)) throw std::invalid_argument("potential: v0 must be >= 0");
  return Potential(Kind::Constant, v0, 0.0, 1.0, 0);
}

Potential Potential::radial(double v0, double amplitude, double width) {
  if (!(width > 0)) throw std::invalid_argument("potential: width must be positive");
  if (!(v0 >= 0) || v0 + std::min(amplitude, 0.0) < 0) {
    throw std::invalid_argument("potential: radial profile would go negative");
  }
  return Potential(Kind::Radial, v0, amplitude, width, 0);
}

Potential Potential::k_symmetric(double v0, double amplitude, double width, int k) {
  if (!(width > 0)) throw std::invalid_argument("potential: width must be positive");
  if (k < 1) throw std::invalid_argument("potential: k must be >= 1");
  // sup_r r^k exp(-r^2/w^2) = (k w^2 / 2)^{k/2} exp(-k/2)
  const double peak = std::pow(0.5 * k * width * width, 0.5 * k) * std::exp(-0.5 * k);
  if (!(v0 >= 0) || v0 - std::abs(amplitude) * peak < 0) {
    throw std::invalid_argument("potential: k-symmetric profile would go negative");
  }
  return Potential(Kind::KSymmetric, v0, amplitude, width, k);
}

double Potential::operator()(double x, double y) const {
  switch (kind_) {
    case Kind::Constant:
      return v0_;
    case Kind::Radial:
      return v0_ + amplitude_ * std::exp(-(x * x + y * y) / (width_ * width_));
    case Kind::KSymmetric: {
      const std::complex<double> zk = std::pow(std::complex<double>(x, y), k_);
      return v0_ + amplitude_ * zk.real() * std::exp(-(x * x + y * y) / (width_ * width_));
    }
  }
  return v0_;
}

Field Potential::sample(const Grid& grid) const {
  if (kind_ == Kind::Constant) {
    return Field(grid, FieldArray<double>::Constant(grid.size(), grid.size(), v0_));
  }
  return Field::from_function(grid, [this](double x, double y) { return (*this)(x, y); });
}

std::string Potential::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Constant:
      os << "constant(" << v0_ << ")";
      break;
    case Kind::Radial:
      os << "radial(" << v0_ << ", " << amplitude_ << ", " << width_ << ")";
      break;
    case Kind::KSymmetric:
      os << "ksym(" << v0_ << ", " << amplitude_ << ", " << width_ << ", k=" << k_ << ")";
      break;
  }
  return os.str();
}

PotentialCheck check_potential(const Potential& potential, const Grid& grid) {
  const Field v = potential.sample(grid);
  const auto& a = v.values();
  const Index n = grid.size();
  PotentialCheck out;
  out.min_value = a.minCoeff();
  out.boundary_inf = std::min({a.row(0).minCoeff(), a.row(n - 1).minCoeff(), a.col(0).minCoeff(),
                               a.col(n - 1).minCoeff()});
  out.nonnegative = out.min_value >= 0;
  out.coercive_at_boundary = out.boundary_inf > 0;
  return out;
}

}  // namespace logsp
