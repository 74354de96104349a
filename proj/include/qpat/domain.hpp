#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

namespace qpat {

using Point = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;

/// Bounded convex 2D domain: disc, axis-aligned rectangle or superellipse.
///
/// Every shape is star-shaped about its center, so the boundary is
/// parametrized by the polar angle about the center and, through a
/// monotone table, by arc length measured counter-clockwise from angle 0.
class DomainSpec {
 public:
  enum class Shape { disc, rectangle, superellipse };

  static DomainSpec unit_disc(Point center = Point::Zero(), double radius = 1.0);
  static DomainSpec rectangle(double x_min, double x_max, double y_min, double y_max);
  static DomainSpec superellipse(Point center, Vec2 semi_axes, double exponent);

  Shape shape() const { return shape_; }
  Point center() const { return center_; }
  Vec2 semi_axes() const { return semi_; }
  double exponent() const { return exponent_; }
  double radius() const { return semi_.x(); }

  /// Implicit function: negative inside, zero on the boundary, positive outside.
  double level(const Point& x) const;
  bool contains(const Point& x) const { return level(x) < 0.0; }
  /// Euclidean signed distance to the boundary, negative inside.
  double signed_distance(const Point& x) const;

  /// Boundary point on the ray from the center at polar angle `angle`.
  Point boundary_at_angle(double angle) const;
  /// Outward unit normal at a boundary point; empty at rectangle corners.
  std::optional<Vec2> normal(const Point& on_boundary) const;

  double perimeter() const { return perimeter_; }
  /// Arc length of a boundary point, in [0, perimeter).
  double arc_length(const Point& on_boundary) const;
  Point point_at_arc(double s) const;

  Point box_min() const;
  Point box_max() const;
  double diameter() const;
  double area() const;
  /// Support function max_{x in closure} u.x for a unit direction u.
  double support(const Vec2& u) const;

 private:
  DomainSpec(Shape shape, Point center, Vec2 semi, double exponent);
  double angle_of(const Point& x) const;
  double arc_of_angle(double angle) const;
  double angle_of_arc(double s) const;

  Shape shape_;
  Point center_;
  Vec2 semi_;
  double exponent_;
  double perimeter_ = 0.0;
  // Polar angle -> arc length table, uniform in angle over [0, 2pi].
  std::vector<double> arc_table_;
};

/// Smallest arc-length separation of two boundary positions on a closed curve.
double periodic_arc_distance(double s, double t, double perimeter);

}  // namespace qpat
