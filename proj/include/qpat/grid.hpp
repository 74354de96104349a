#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "qpat/domain.hpp"
#include "qpat/errors.hpp"

namespace qpat {

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;
using complexd = std::complex<double>;

/// Intersection of a grid line with the domain boundary.
struct BoundaryPoint {
  Point x;
  double arc = 0.0;
  std::optional<Vec2> normal;
};

/// Neighbor directions of the 5-point stencil.
enum Dir : int { east = 0, west = 1, north = 2, south = 3 };

inline constexpr Dir opposite(Dir d) {
  return d == east ? west : d == west ? east : d == north ? south : north;
}

/// Arm of an interior node towards one neighbor. `theta` is the fraction of
/// the grid spacing at which the arm ends; theta == 1 with `bpoint < 0`
/// means the neighbor node itself is interior.
struct Arm {
  double theta = 1.0;
  int bpoint = -1;
  bool cut() const { return bpoint >= 0; }
};

/// Uniform lattice spanning the bounding box of a domain.
///
/// Node (i, j) sits at origin + (i dx, j dy) and has linear index j nx + i.
/// A node is interior when strictly inside the domain. Every interior node
/// stores its four arms; arms that leave the domain end on a boundary point.
class Grid {
 public:
  static std::shared_ptr<const Grid> build(const DomainSpec& domain, int nx, int ny);

  const DomainSpec& domain() const { return domain_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int size() const { return nx_ * ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double h_max() const { return std::max(dx_, dy_); }
  Point origin() const { return origin_; }

  int index(int i, int j) const { return j * nx_ + i; }
  int col(int k) const { return k % nx_; }
  int row(int k) const { return k / nx_; }
  Point node(int k) const { return origin_ + Vec2(col(k) * dx_, row(k) * dy_); }
  double spacing(Dir d) const { return d <= west ? dx_ : dy_; }
  /// Neighbor node index, or -1 when it falls outside the lattice.
  int neighbor(int k, Dir d) const;

  const Mask& interior() const { return interior_; }
  bool is_interior(int k) const { return k >= 0 && k < size() && interior_[k]; }
  const std::vector<int>& interior_nodes() const { return interior_nodes_; }
  const std::array<Arm, 4>& arms(int k) const { return arms_[k]; }

  const std::vector<BoundaryPoint>& boundary() const { return boundary_; }
  int boundary_size() const { return int(boundary_.size()); }

 private:
  Grid(const DomainSpec& domain, int nx, int ny);

  DomainSpec domain_;
  int nx_, ny_;
  double dx_, dy_;
  Point origin_;
  Mask interior_;
  std::vector<int> interior_nodes_;
  std::vector<std::array<Arm, 4>> arms_;
  std::vector<BoundaryPoint> boundary_;
};

using GridPtr = std::shared_ptr<const Grid>;

template <typename T>
inline T nan_value() {
  if constexpr (std::is_same_v<T, complexd>) {
    const double n = std::numeric_limits<double>::quiet_NaN();
    return T(n, n);
  } else {
    return std::numeric_limits<T>::quiet_NaN();
  }
}

inline bool is_finite(double v) { return std::isfinite(v); }
inline bool is_finite(const complexd& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

/// Grid-sampled function: one value per lattice node (NaN where undefined)
/// plus one value per boundary point (possibly empty).
template <typename T>
class Field {
 public:
  using Scalar = T;
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  Field() = default;
  explicit Field(GridPtr grid)
      : grid_(std::move(grid)),
        nodes_(Vector::Constant(grid_->size(), nan_value<T>())),
        boundary_(Vector::Constant(grid_->boundary_size(), nan_value<T>())) {}

  static Field constant(GridPtr grid, T value) {
    Field f(grid);
    for (int k : grid->interior_nodes()) f.nodes_[k] = value;
    f.boundary_.setConstant(value);
    return f;
  }

  /// Evaluates `fn(Point)` at interior nodes and at boundary points.
  template <typename Fn>
  static Field sample(GridPtr grid, Fn&& fn) {
    Field f(grid);
    for (int k : grid->interior_nodes()) f.nodes_[k] = T(fn(grid->node(k)));
    for (int b = 0; b < grid->boundary_size(); ++b) f.boundary_[b] = T(fn(grid->boundary()[b].x));
    return f;
  }

  const GridPtr& grid() const { return grid_; }
  bool empty() const { return !grid_; }

  Vector& nodes() { return nodes_; }
  const Vector& nodes() const { return nodes_; }
  Vector& boundary() { return boundary_; }
  const Vector& boundary() const { return boundary_; }
  bool has_boundary() const {
    return boundary_.size() > 0 && boundary_.unaryExpr([](T v) { return is_finite(v); }).all();
  }

  T& operator[](int k) { return nodes_[k]; }
  T operator[](int k) const { return nodes_[k]; }
  T& operator()(int i, int j) { return nodes_[grid_->index(i, j)]; }
  T operator()(int i, int j) const { return nodes_[grid_->index(i, j)]; }

  Field& operator+=(const Field& o) {
    check_same(o);
    nodes_ += o.nodes_;
    boundary_ += o.boundary_;
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same(o);
    nodes_ -= o.nodes_;
    boundary_ -= o.boundary_;
    return *this;
  }
  Field& operator*=(const Field& o) {
    check_same(o);
    nodes_.array() *= o.nodes_.array();
    boundary_.array() *= o.boundary_.array();
    return *this;
  }
  Field& operator*=(T s) {
    nodes_ *= s;
    boundary_ *= s;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, const Field& b) { return a *= b; }
  friend Field operator*(Field a, T s) { return a *= s; }
  friend Field operator*(T s, Field a) { return a *= s; }

  void check_same(const Field& o) const {
    require(grid_ && grid_ == o.grid_, ErrorKind::precondition,
            "field arithmetic requires identical grids");
  }

 private:
  GridPtr grid_;
  Vector nodes_;
  Vector boundary_;
};

using ScalarField = Field<double>;
using ComplexField = Field<complexd>;

template <typename T>
struct VectorField {
  Field<T> x;
  Field<T> y;
};

/// Applies `fn` to every node and boundary value.
template <typename T, typename Fn>
auto map(const Field<T>& f, Fn&& fn) {
  using R = decltype(fn(T{}));
  Field<R> out(f.grid());
  out.nodes() = f.nodes().unaryExpr(fn);
  out.boundary() = f.boundary().unaryExpr(fn);
  return out;
}

inline ScalarField real(const ComplexField& f) {
  return map(f, [](complexd v) { return v.real(); });
}
inline ScalarField imag(const ComplexField& f) {
  return map(f, [](complexd v) { return v.imag(); });
}
inline ComplexField to_complex(const ScalarField& f) {
  return map(f, [](double v) { return complexd(v, 0.0); });
}

/// Interior mask of the grid restricted by an optional predicate on nodes.
Mask interior_mask(const Grid& grid);
/// Adds `rings` layers of 4-neighbors to `mask`, restricted to interior nodes.
Mask dilate(const Grid& grid, const Mask& mask, int rings);
int count(const Mask& mask);

/// Sup norm over masked nodes (and boundary values when requested).
template <typename T>
double max_abs(const Field<T>& f, const Mask& mask) {
  double m = 0.0;
  for (int k = 0; k < f.grid()->size(); ++k)
    if (mask[k]) m = std::max(m, double(std::abs(f[k])));
  return m;
}

/// Field values restricted to a mask; other nodes become NaN.
template <typename T>
Field<T> restrict_to(const Field<T>& f, const Mask& mask) {
  Field<T> out = f;
  for (int k = 0; k < f.grid()->size(); ++k)
    if (!mask[k]) out[k] = nan_value<T>();
  return out;
}

/// Bilinear interpolation of lattice values. Nodes without a finite value
/// are skipped; returns NaN when no corner is usable.
double bilinear(const Grid& grid, const Eigen::VectorXd& nodes, const Point& x);

/// Tensor cubic Lagrange interpolation on the 4x4 nodes around `x` (window
/// shifted inward at the lattice edge). Falls back to `bilinear` when a
/// window value is not finite.
double bicubic(const Grid& grid, const Eigen::VectorXd& nodes, const Point& x);

}  // namespace qpat
