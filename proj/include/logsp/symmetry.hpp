#pragma once

// Finite subgroups of O(2) acting on grid fields by (g u)(x) = u(g^{-1} x).

#include "logsp/grid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace logsp {

using GroupElement = Eigen::Matrix2d;

/// rotation_k is generated by the rotation z -> z e^{2 pi i / k};
/// dihedral_k adds the mirror z -> conj(z).
class SymmetryGroup {
 public:
  enum class Kind { Rotation, Dihedral };

  SymmetryGroup(Kind kind, int k);

  static SymmetryGroup rotation(int k) { return SymmetryGroup(Kind::Rotation, k); }
  static SymmetryGroup dihedral(int k) { return SymmetryGroup(Kind::Dihedral, k); }

  Kind kind() const { return kind_; }
  int k() const { return k_; }
  std::size_t order() const { return elements_.size(); }
  const std::vector<GroupElement>& elements() const { return elements_; }

  /// Every element maps the cell-centered grid onto itself.
  bool exact_on_grid() const;
  /// Admissible for the existence theory: k >= 4 for rotations, k >= 2 with the mirror.
  bool meets_vf_condition() const { return kind_ == Kind::Rotation ? k_ >= 4 : k_ >= 2; }
  std::string name() const;

 private:
  Kind kind_;
  int k_;
  std::vector<GroupElement> elements_;
};

namespace detail {

inline bool is_signed_permutation(const GroupElement& g) {
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double v = g(r, c);
      if (std::abs(v) > 1e-12 && std::abs(std::abs(v) - 1.0) > 1e-12) return false;
    }
  }
  return true;
}

inline int rounded(double v) { return v > 0.5 ? 1 : (v < -0.5 ? -1 : 0); }

}  // namespace detail

inline SymmetryGroup::SymmetryGroup(Kind kind, int k) : kind_(kind), k_(k) {
  if (k < 1) throw std::invalid_argument("symmetry: k must be >= 1");
  for (int j = 0; j < k; ++j) {
    const double a = 2.0 * std::numbers::pi * j / k;
    GroupElement r;
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    // Snap quarter-turn entries so exact groups stay exact.
    for (int idx = 0; idx < 4; ++idx) {
      double& v = r.data()[idx];
      const double s = std::round(v);
      if (std::abs(v - s) < 1e-14) v = s;
    }
    elements_.push_back(r);
  }
  if (kind == Kind::Dihedral) {
    GroupElement mirror;
    mirror << 1, 0, 0, -1;
    const std::size_t rotations = elements_.size();
    for (std::size_t j = 0; j < rotations; ++j) elements_.push_back(elements_[j] * mirror);
  }
  // Closure: every product must be (numerically) an element.
  for (const auto& a : elements_) {
    for (const auto& b : elements_) {
      const GroupElement prod = a * b;
      const bool found = std::any_of(elements_.begin(), elements_.end(), [&](const auto& e) {
        return (e - prod).cwiseAbs().maxCoeff() < 1e-10;
      });
      if (!found) throw std::logic_error("symmetry: element set is not closed");
    }
  }
}

inline bool SymmetryGroup::exact_on_grid() const {
  return std::all_of(elements_.begin(), elements_.end(), detail::is_signed_permutation);
}

inline std::string SymmetryGroup::name() const {
  return (kind_ == Kind::Rotation ? "rotation_" : "dihedral_") + std::to_string(k_);
}

/// (g u)(x) = u(g^{-1} x). Signed-permutation elements are index permutations;
/// anything else falls back to bilinear interpolation with zero extension.
template <typename Scalar>
GridField<Scalar> apply(const GroupElement& g, const GridField<Scalar>& u) {
  const auto& grid = u.grid();
  const Index n = grid.size();
  const GroupElement inv = g.transpose();
  GridField<Scalar> out(grid);
  if (detail::is_signed_permutation(g)) {
    const int a = detail::rounded(inv(0, 0)), b = detail::rounded(inv(0, 1));
    const int c = detail::rounded(inv(1, 0)), d = detail::rounded(inv(1, 1));
    // Signed index: +1 keeps i, -1 maps to n - 1 - i.
    auto pick = [n](int sign, Index i) { return sign > 0 ? i : n - 1 - i; };
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) {
        const Index si = a != 0 ? pick(a, i) : pick(b, j);
        const Index sj = c != 0 ? pick(c, i) : pick(d, j);
        out(i, j) = u(si, sj);
      }
    }
    return out;
  }
  const double h = double(grid.spacing());
  const double lo = double(grid.coord(0));
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const Eigen::Vector2d x(double(grid.coord(i)), double(grid.coord(j)));
      const Eigen::Vector2d src = inv * x;
      const double fi = (src.x() - lo) / h;
      const double fj = (src.y() - lo) / h;
      const Index i0 = Index(std::floor(fi));
      const Index j0 = Index(std::floor(fj));
      const double ti = fi - double(i0);
      const double tj = fj - double(j0);
      auto at = [&](Index ii, Index jj) -> double {
        return (ii < 0 || jj < 0 || ii >= n || jj >= n) ? 0.0 : double(u(ii, jj));
      };
      out(i, j) = Scalar((1 - ti) * (1 - tj) * at(i0, j0) + ti * (1 - tj) * at(i0 + 1, j0) +
                         (1 - ti) * tj * at(i0, j0 + 1) + ti * tj * at(i0 + 1, j0 + 1));
    }
  }
  return out;
}

/// (1/#G) sum_g g u
template <typename Scalar>
GridField<Scalar> group_average(const SymmetryGroup& group, const GridField<Scalar>& u) {
  GridField<Scalar> acc(u.grid());
  for (const auto& g : group.elements()) acc += apply(g, u);
  acc *= Scalar(1) / Scalar(group.order());
  return acc;
}

/// max_g ||g u - u||_2 / max(||u||_2, 1e-300)
template <typename Scalar>
Scalar symmetry_defect(const SymmetryGroup& group, const GridField<Scalar>& u) {
  const Scalar base = std::max<Scalar>(std::sqrt(u.values().square().sum()), Scalar(1e-300));
  Scalar worst = 0;
  for (const auto& g : group.elements()) {
    const Scalar d = std::sqrt((apply(g, u).values() - u.values()).square().sum());
    worst = std::max(worst, d);
  }
  return worst / base;
}

}  // namespace logsp
