#pragma once

#include "logsp/grid.hpp"

#include <string>

namespace logsp {

/// External potential V(x) >= 0.
///
///   constant : V = v0
///   radial   : V = v0 + amplitude * exp(-|x|^2 / width^2)
///   ksym     : V = v0 + amplitude * Re(z^k) * exp(-|x|^2 / width^2)
///
/// The k-symmetric form is invariant under z -> z e^{2 pi i/k} and z -> conj(z).
class Potential {
 public:
  enum class Kind { Constant, Radial, KSymmetric };

  static Potential constant(double v0);
  static Potential radial(double v0, double amplitude, double width);
  static Potential k_symmetric(double v0, double amplitude, double width, int k);

  Kind kind() const { return kind_; }
  double v0() const { return v0_; }
  double amplitude() const { return amplitude_; }
  double width() const { return width_; }
  int k() const { return k_; }
  bool is_constant() const { return kind_ == Kind::Constant; }
  std::string describe() const;

  double operator()(double x, double y) const;
  Field sample(const Grid& grid) const;

 private:
  Potential(Kind kind, double v0, double amplitude, double width, int k)
      : kind_(kind), v0_(v0), amplitude_(amplitude), width_(width), k_(k) {}

  Kind kind_;
  double v0_;
  double amplitude_;
  double width_;
  int k_;
};

struct PotentialCheck {
  double min_value = 0;
  double boundary_inf = 0;
  bool nonnegative = false;
  bool coercive_at_boundary = false;
  bool ok() const { return nonnegative && coercive_at_boundary; }
};

/// Discrete (V0): V >= 0 on the grid and inf over the outer ring > 0.
PotentialCheck check_potential(const Potential& potential, const Grid& grid);

}  // namespace logsp
