#pragma once

// Uniform cell-centered grid on [-L, L]^2, field storage, midpoint quadrature
// and the norms of the weighted energy space.

#include <Eigen/Core>

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace logsp {

using Eigen::Index;

template <typename Scalar>
using FieldArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Cell-centered N x N grid on [-L, L]^2. Node (i, j) sits at (x_i, y_j) with
/// x_i = -L + (i + 1/2) h. Even N makes every quarter turn and axis
/// mirror an exact index permutation.
template <typename Scalar = double>
class Grid2D {
 public:
  Grid2D(Scalar half_width, Index n) : half_width_(half_width), n_(n) {
    if (!(half_width > Scalar(0)) || !std::isfinite(double(half_width))) {
      throw std::invalid_argument("grid: half width must be positive and finite");
    }
    if (n % 2 != 0) throw std::invalid_argument("grid: odd N breaks symmetry exactness");
    if (n < 4) throw std::invalid_argument("grid: N must be at least 4");
    spacing_ = Scalar(2) * half_width / Scalar(n);
  }

  Scalar half_width() const { return half_width_; }
  Index size() const { return n_; }
  Scalar spacing() const { return spacing_; }
  Scalar cell_area() const { return spacing_ * spacing_; }
  Scalar coord(Index i) const { return -half_width_ + (Scalar(i) + Scalar(0.5)) * spacing_; }

  bool operator==(const Grid2D& other) const {
    return n_ == other.n_ && half_width_ == other.half_width_;
  }
  bool operator!=(const Grid2D& other) const { return !(*this == other); }

 private:
  Scalar half_width_;
  Index n_;
  Scalar spacing_;
};

template <typename Scalar>
Grid2D<Scalar> make_grid(Scalar half_width, Index n) {
  return Grid2D<Scalar>(half_width, n);
}

/// Samples u(x_i, y_j) stored as values(i, j); i runs along x.
template <typename Scalar = double>
class GridField {
 public:
  explicit GridField(const Grid2D<Scalar>& grid)
      : grid_(grid), values_(FieldArray<Scalar>::Zero(grid.size(), grid.size())) {}

  GridField(const Grid2D<Scalar>& grid, FieldArray<Scalar> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.rows() != grid.size() || values_.cols() != grid.size()) {
      throw std::invalid_argument("field: array shape does not match grid");
    }
  }

  template <typename Func>
  static GridField from_function(const Grid2D<Scalar>& grid, Func&& func) {
    GridField field(grid);
    for (Index j = 0; j < grid.size(); ++j) {
      for (Index i = 0; i < grid.size(); ++i) {
        field.values_(i, j) = func(grid.coord(i), grid.coord(j));
      }
    }
    return field;
  }

  const Grid2D<Scalar>& grid() const { return grid_; }
  const FieldArray<Scalar>& values() const { return values_; }
  FieldArray<Scalar>& values() { return values_; }
  Scalar operator()(Index i, Index j) const { return values_(i, j); }
  Scalar& operator()(Index i, Index j) { return values_(i, j); }

  bool all_finite() const { return values_.allFinite(); }

  GridField& operator+=(const GridField& other) {
    check_same_grid(other);
    values_ += other.values_;
    return *this;
  }
  GridField& operator-=(const GridField& other) {
    check_same_grid(other);
    values_ -= other.values_;
    return *this;
  }
  GridField& operator*=(Scalar c) {
    values_ *= c;
    return *this;
  }

  friend GridField operator+(GridField a, const GridField& b) { return a += b; }
  friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
  friend GridField operator*(GridField a, Scalar c) { return a *= c; }
  friend GridField operator*(Scalar c, GridField a) { return a *= c; }

  void check_same_grid(const GridField& other) const {
    if (grid_ != other.grid_) throw std::invalid_argument("field: grid mismatch");
  }

 private:
  Grid2D<Scalar> grid_;
  FieldArray<Scalar> values_;
};

namespace detail {

template <typename Scalar>
void require_finite(const GridField<Scalar>& u, const char* what) {
  if (!u.all_finite()) throw std::domain_error(std::string(what) + ": non-finite field value");
}

template <typename Scalar>
void require_same_grid(const GridField<Scalar>& a, const GridField<Scalar>& b) {
  a.check_same_grid(b);
}

}  // namespace detail

/// Midpoint rule: h^2 * sum of samples.
template <typename Scalar>
Scalar integrate(const GridField<Scalar>& w) {
  detail::require_finite(w, "integrate");
  return w.grid().cell_area() * w.values().sum();
}

template <typename Scalar, typename Derived>
Scalar integrate(const Grid2D<Scalar>& grid, const Eigen::ArrayBase<Derived>& w) {
  return grid.cell_area() * w.sum();
}

/// Sum of squared forward differences over every grid edge, including the
/// edges joining the outer ring to the zero extension. Its first variation
/// is the 5-point Dirichlet Laplacian.
template <typename Scalar>
Scalar dirichlet_energy(const GridField<Scalar>& u) {
  const auto& a = u.values();
  const Index n = a.rows();
  Scalar acc = 0;
  for (Index j = 0; j < n; ++j) {
    acc += a(0, j) * a(0, j) + a(n - 1, j) * a(n - 1, j);
    for (Index i = 0; i + 1 < n; ++i) {
      const Scalar d = a(i + 1, j) - a(i, j);
      acc += d * d;
    }
  }
  for (Index i = 0; i < n; ++i) {
    acc += a(i, 0) * a(i, 0) + a(i, n - 1) * a(i, n - 1);
    for (Index j = 0; j + 1 < n; ++j) {
      const Scalar d = a(i, j + 1) - a(i, j);
      acc += d * d;
    }
  }
  // h^2 * sum (d/h)^2
  return acc;
}

template <typename Scalar>
Scalar dirichlet_inner(const GridField<Scalar>& u, const GridField<Scalar>& v) {
  detail::require_same_grid(u, v);
  const auto& a = u.values();
  const auto& b = v.values();
  const Index n = a.rows();
  Scalar acc = 0;
  for (Index j = 0; j < n; ++j) {
    acc += a(0, j) * b(0, j) + a(n - 1, j) * b(n - 1, j);
    for (Index i = 0; i + 1 < n; ++i) acc += (a(i + 1, j) - a(i, j)) * (b(i + 1, j) - b(i, j));
  }
  for (Index i = 0; i < n; ++i) {
    acc += a(i, 0) * b(i, 0) + a(i, n - 1) * b(i, n - 1);
    for (Index j = 0; j + 1 < n; ++j) acc += (a(i, j + 1) - a(i, j)) * (b(i, j + 1) - b(i, j));
  }
  return acc;
}

/// -Delta_h u with the 5-point stencil and zero Dirichlet extension.
template <typename Scalar>
FieldArray<Scalar> neg_laplacian(const GridField<Scalar>& u) {
  const auto& a = u.values();
  const Index n = a.rows();
  const Scalar inv_h2 = Scalar(1) / u.grid().cell_area();
  FieldArray<Scalar> out(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      Scalar s = Scalar(4) * a(i, j);
      if (i > 0) s -= a(i - 1, j);
      if (i + 1 < n) s -= a(i + 1, j);
      if (j > 0) s -= a(i, j - 1);
      if (j + 1 < n) s -= a(i, j + 1);
      out(i, j) = s * inv_h2;
    }
  }
  return out;
}

/// ||u||^2 = int |grad u|^2 + V u^2, with V given as samples on the same grid.
template <typename Scalar>
Scalar norm_H_squared(const GridField<Scalar>& u, const GridField<Scalar>& potential) {
  detail::require_same_grid(u, potential);
  detail::require_finite(u, "norm_H");
  const Scalar mass = u.grid().cell_area() * (potential.values() * u.values().square()).sum();
  const Scalar result = dirichlet_energy(u) + mass;
  if (std::isnan(double(result))) throw std::domain_error("norm_H: NaN");
  return result;
}

template <typename Scalar>
Scalar norm_H(const GridField<Scalar>& u, const GridField<Scalar>& potential) {
  return std::sqrt(norm_H_squared(u, potential));
}

template <typename Scalar>
Scalar inner_H(const GridField<Scalar>& u, const GridField<Scalar>& v,
               const GridField<Scalar>& potential) {
  detail::require_same_grid(u, v);
  detail::require_same_grid(u, potential);
  return dirichlet_inner(u, v) +
         u.grid().cell_area() * (potential.values() * u.values() * v.values()).sum();
}

/// (int ln(1 + |x|) |u|^p)^{1/p}
template <typename Scalar>
Scalar norm_star(const GridField<Scalar>& u, Scalar p) {
  if (p < Scalar(2)) throw std::invalid_argument("norm_star: p must be >= 2");
  const auto& g = u.grid();
  Scalar acc = 0;
  for (Index j = 0; j < g.size(); ++j) {
    for (Index i = 0; i < g.size(); ++i) {
      const Scalar r = std::hypot(g.coord(i), g.coord(j));
      acc += std::log1p(r) * std::pow(std::abs(u(i, j)), p);
    }
  }
  return std::pow(g.cell_area() * acc, Scalar(1) / p);
}

template <typename Scalar>
Scalar norm_Lq(const GridField<Scalar>& u, Scalar q) {
  if (q < Scalar(1)) throw std::invalid_argument("norm_Lq: q must be >= 1");
  detail::require_finite(u, "norm_Lq");
  const Scalar s = u.grid().cell_area() * u.values().abs().pow(q).sum();
  return std::pow(s, Scalar(1) / q);
}

/// ||u||_{X_p} = ||u|| + ||u||_*
template <typename Scalar>
Scalar norm_Xp(const GridField<Scalar>& u, const GridField<Scalar>& potential, Scalar p) {
  return norm_H(u, potential) + norm_star(u, p);
}

template <typename Scalar>
Scalar boundary_ring_max(const GridField<Scalar>& u) {
  const auto& a = u.values();
  const Index n = a.rows();
  return std::max({a.row(0).abs().maxCoeff(), a.row(n - 1).abs().maxCoeff(),
                   a.col(0).abs().maxCoeff(), a.col(n - 1).abs().maxCoeff()});
}

/// True when |u| < tol on the outermost ring (compact-support proxy).
template <typename Scalar>
bool decays_at_boundary(const GridField<Scalar>& u, Scalar tol = Scalar(1e-10)) {
  return boundary_ring_max(u) < tol;
}

/// CSV dump with header "x,y,u", rows in row-major node order, 17 significant digits.
template <typename Scalar>
void write_field_csv(std::ostream& os, const GridField<Scalar>& u) {
  const auto& g = u.grid();
  const auto old_precision = os.precision(17);
  os << "x,y,u\n";
  for (Index i = 0; i < g.size(); ++i) {
    for (Index j = 0; j < g.size(); ++j) {
      os << double(g.coord(i)) << ',' << double(g.coord(j)) << ',' << double(u(i, j)) << '\n';
    }
  }
  os.precision(old_precision);
}

using Grid = Grid2D<double>;
using Field = GridField<double>;

}  // namespace logsp
