#include "qpat/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qpat/errors.hpp"

namespace qpat {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kArcTableSize = 16384;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

}  // namespace

double periodic_arc_distance(double s, double t, double perimeter) {
  double d = std::fabs(std::fmod(s - t, perimeter));
  return std::min(d, perimeter - d);
}

DomainSpec::DomainSpec(Shape shape, Point center, Vec2 semi, double exponent)
    : shape_(shape), center_(center), semi_(semi), exponent_(exponent) {
  switch (shape_) {
    case Shape::disc:
      perimeter_ = kTwoPi * semi_.x();
      break;
    case Shape::rectangle:
      perimeter_ = 4.0 * (semi_.x() + semi_.y());
      break;
    case Shape::superellipse: {
      // Polyline length with 4 sub-samples per table interval.
      arc_table_.assign(kArcTableSize + 1, 0.0);
      const int sub = 4;
      Point prev = boundary_at_angle(0.0);
      for (int k = 1; k <= kArcTableSize; ++k) {
        double acc = 0.0;
        for (int m = 1; m <= sub; ++m) {
          const double a = kTwoPi * (k - 1 + double(m) / sub) / kArcTableSize;
          const Point p = boundary_at_angle(a);
          acc += (p - prev).norm();
          prev = p;
        }
        arc_table_[k] = arc_table_[k - 1] + acc;
      }
      perimeter_ = arc_table_.back();
      break;
    }
  }
}

DomainSpec DomainSpec::unit_disc(Point center, double radius) {
  require(radius > 0.0 && std::isfinite(radius), ErrorKind::invalid_domain,
          "disc radius must be positive");
  return DomainSpec(Shape::disc, center, Vec2(radius, radius), 2.0);
}

DomainSpec DomainSpec::rectangle(double x_min, double x_max, double y_min, double y_max) {
  require(x_max > x_min && y_max > y_min, ErrorKind::invalid_domain,
          "rectangle has zero area");
  return DomainSpec(Shape::rectangle, Point(0.5 * (x_min + x_max), 0.5 * (y_min + y_max)),
                    Vec2(0.5 * (x_max - x_min), 0.5 * (y_max - y_min)), 0.0);
}

DomainSpec DomainSpec::superellipse(Point center, Vec2 semi_axes, double exponent) {
  require(semi_axes.x() > 0.0 && semi_axes.y() > 0.0, ErrorKind::invalid_domain,
          "superellipse semi-axes must be positive");
  require(exponent >= 1.0, ErrorKind::invalid_domain,
          "superellipse exponent below 1 is not convex");
  return DomainSpec(Shape::superellipse, center, semi_axes, exponent);
}

double DomainSpec::level(const Point& x) const {
  const Vec2 d = x - center_;
  switch (shape_) {
    case Shape::disc:
      return d.norm() - semi_.x();
    case Shape::rectangle:
      return std::max(std::fabs(d.x()) - semi_.x(), std::fabs(d.y()) - semi_.y());
    case Shape::superellipse: {
      const double p = exponent_;
      const double f = std::pow(std::fabs(d.x()) / semi_.x(), p) +
                       std::pow(std::fabs(d.y()) / semi_.y(), p);
      return std::pow(f, 1.0 / p) - 1.0;
    }
  }
  return 0.0;
}

double DomainSpec::signed_distance(const Point& x) const {
  const Vec2 d = x - center_;
  switch (shape_) {
    case Shape::disc:
      return d.norm() - semi_.x();
    case Shape::rectangle: {
      const Vec2 q(std::fabs(d.x()) - semi_.x(), std::fabs(d.y()) - semi_.y());
      const Vec2 outside = q.cwiseMax(0.0);
      return outside.norm() + std::min(std::max(q.x(), q.y()), 0.0);
    }
    case Shape::superellipse: {
      const int n = 4096;
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k < n; ++k) {
        const Point a = point_at_arc(perimeter_ * k / n);
        const Point b = point_at_arc(perimeter_ * (k + 1) / n);
        const Vec2 ab = b - a;
        const double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
        best = std::min(best, (x - (a + t * ab)).norm());
      }
      return level(x) < 0.0 ? -best : best;
    }
  }
  return 0.0;
}

Point DomainSpec::boundary_at_angle(double angle) const {
  const Vec2 dir(std::cos(angle), std::sin(angle));
  switch (shape_) {
    case Shape::disc:
      return center_ + semi_.x() * dir;
    case Shape::rectangle: {
      const double tx = std::fabs(dir.x()) > 0.0 ? semi_.x() / std::fabs(dir.x())
                                                 : std::numeric_limits<double>::infinity();
      const double ty = std::fabs(dir.y()) > 0.0 ? semi_.y() / std::fabs(dir.y())
                                                 : std::numeric_limits<double>::infinity();
      return center_ + std::min(tx, ty) * dir;
    }
    case Shape::superellipse: {
      const double p = exponent_;
      const double f = std::pow(std::fabs(dir.x()) / semi_.x(), p) +
                       std::pow(std::fabs(dir.y()) / semi_.y(), p);
      return center_ + std::pow(f, -1.0 / p) * dir;
    }
  }
  return center_;
}

std::optional<Vec2> DomainSpec::normal(const Point& x) const {
  const Vec2 d = x - center_;
  switch (shape_) {
    case Shape::disc:
      return d.normalized();
    case Shape::rectangle: {
      const double tol = 1e-12 * (semi_.x() + semi_.y());
      const bool on_x = std::fabs(std::fabs(d.x()) - semi_.x()) <= tol;
      const bool on_y = std::fabs(std::fabs(d.y()) - semi_.y()) <= tol;
      if (on_x && on_y) return std::nullopt;
      const double ex = std::fabs(d.x()) - semi_.x();
      const double ey = std::fabs(d.y()) - semi_.y();
      if (ex >= ey) return Vec2(d.x() > 0 ? 1.0 : -1.0, 0.0);
      return Vec2(0.0, d.y() > 0 ? 1.0 : -1.0);
    }
    case Shape::superellipse: {
      const double p = exponent_;
      const double gx = std::pow(std::fabs(d.x()) / semi_.x(), p - 1.0) / semi_.x();
      const double gy = std::pow(std::fabs(d.y()) / semi_.y(), p - 1.0) / semi_.y();
      Vec2 g(std::copysign(gx, d.x()), std::copysign(gy, d.y()));
      return g.normalized();
    }
  }
  return std::nullopt;
}

double DomainSpec::angle_of(const Point& x) const {
  const Vec2 d = x - center_;
  return wrap_angle(std::atan2(d.y(), d.x()));
}

double DomainSpec::arc_of_angle(double angle) const {
  angle = wrap_angle(angle);
  switch (shape_) {
    case Shape::disc:
      return semi_.x() * angle;
    case Shape::rectangle: {
      const Vec2 d = boundary_at_angle(angle) - center_;
      const double a = semi_.x();
      const double b = semi_.y();
      const double tol = 1e-12 * (a + b);
      if (d.x() >= a - tol && d.y() >= -tol) return std::clamp(d.y(), 0.0, b);
      if (d.y() >= b - tol) return b + (a - d.x());
      if (d.x() <= -a + tol) return b + 2 * a + (b - d.y());
      if (d.y() <= -b + tol) return 3 * b + 2 * a + (d.x() + a);
      return 3 * b + 4 * a + (d.y() + b);
    }
    case Shape::superellipse: {
      const double pos = angle / kTwoPi * kArcTableSize;
      const int k = std::min(int(pos), kArcTableSize - 1);
      const double w = pos - k;
      return (1.0 - w) * arc_table_[k] + w * arc_table_[k + 1];
    }
  }
  return 0.0;
}

double DomainSpec::angle_of_arc(double s) const {
  s = std::fmod(s, perimeter_);
  if (s < 0.0) s += perimeter_;
  const auto it = std::upper_bound(arc_table_.begin(), arc_table_.end(), s);
  const int k = std::clamp(int(it - arc_table_.begin()) - 1, 0, kArcTableSize - 1);
  const double span = arc_table_[k + 1] - arc_table_[k];
  const double w = span > 0.0 ? (s - arc_table_[k]) / span : 0.0;
  return kTwoPi * (k + w) / kArcTableSize;
}

double DomainSpec::arc_length(const Point& on_boundary) const {
  const double s = arc_of_angle(angle_of(on_boundary));
  return s >= perimeter_ ? s - perimeter_ : s;
}

Point DomainSpec::point_at_arc(double s) const {
  s = std::fmod(s, perimeter_);
  if (s < 0.0) s += perimeter_;
  switch (shape_) {
    case Shape::disc:
      return boundary_at_angle(s / semi_.x());
    case Shape::rectangle: {
      const double a = semi_.x();
      const double b = semi_.y();
      Vec2 d;
      if (s <= b) {
        d = Vec2(a, s);
      } else if (s <= b + 2 * a) {
        d = Vec2(a - (s - b), b);
      } else if (s <= 3 * b + 2 * a) {
        d = Vec2(-a, b - (s - b - 2 * a));
      } else if (s <= 3 * b + 4 * a) {
        d = Vec2(-a + (s - 3 * b - 2 * a), -b);
      } else {
        d = Vec2(a, -b + (s - 3 * b - 4 * a));
      }
      return center_ + d;
    }
    case Shape::superellipse:
      return boundary_at_angle(angle_of_arc(s));
  }
  return center_;
}

Point DomainSpec::box_min() const { return center_ - semi_; }
Point DomainSpec::box_max() const { return center_ + semi_; }

double DomainSpec::diameter() const {
  switch (shape_) {
    case Shape::disc:
      return 2.0 * semi_.x();
    case Shape::rectangle:
      return 2.0 * semi_.norm();
    case Shape::superellipse: {
      // Centrally symmetric: diameter is twice the largest radius.
      double r = 0.0;
      for (int k = 0; k < 4096; ++k)
        r = std::max(r, (boundary_at_angle(kTwoPi * k / 4096) - center_).norm());
      return 2.0 * r;
    }
  }
  return 0.0;
}

double DomainSpec::area() const {
  switch (shape_) {
    case Shape::disc:
      return std::numbers::pi * semi_.x() * semi_.x();
    case Shape::rectangle:
      return 4.0 * semi_.x() * semi_.y();
    case Shape::superellipse: {
      const double g1 = std::tgamma(1.0 + 1.0 / exponent_);
      return 4.0 * semi_.x() * semi_.y() * g1 * g1 / std::tgamma(1.0 + 2.0 / exponent_);
    }
  }
  return 0.0;
}

double DomainSpec::support(const Vec2& u) const {
  switch (shape_) {
    case Shape::disc:
      return u.dot(center_) + semi_.x() * u.norm();
    case Shape::rectangle:
      return u.dot(center_) + semi_.x() * std::fabs(u.x()) + semi_.y() * std::fabs(u.y());
    case Shape::superellipse: {
      const double ax = semi_.x() * std::fabs(u.x());
      const double by = semi_.y() * std::fabs(u.y());
      if (exponent_ == 1.0) return u.dot(center_) + std::max(ax, by);
      const double q = exponent_ / (exponent_ - 1.0);
      return u.dot(center_) + std::pow(std::pow(ax, q) + std::pow(by, q), 1.0 / q);
    }
  }
  return 0.0;
}

}  // namespace qpat
