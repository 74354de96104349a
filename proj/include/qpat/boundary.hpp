#pragma once

#include <vector>

#include "qpat/domain.hpp"
#include "qpat/grid.hpp"

namespace qpat {

/// Dense boundary sample with its partition flags.
struct BoundaryNode {
  Point x;
  std::optional<Vec2> normal;
  double arc = 0.0;
  bool in_front = false;
  bool in_gamma = false;
  bool in_gamma_minus = true;
};

/// Arc-length interval [start, start + length) on the closed boundary.
struct ArcInterval {
  double start = 0.0;
  double length = 0.0;
};

/// Partition of the boundary relative to a pole x0.
///
/// The front is where (x0 - x).n(x) > 0. Gamma is the front dilated by
/// `gamma_margin` in arc length and Gamma-minus is its complement. Points
/// without a normal (rectangle corners) belong to neither front nor Gamma.
class BoundarySegmentation {
 public:
  const DomainSpec& domain() const { return domain_; }
  Point x0() const { return x0_; }
  double gamma_margin() const { return gamma_margin_; }
  const std::vector<BoundaryNode>& nodes() const { return nodes_; }
  const std::vector<ArcInterval>& front_intervals() const { return front_; }

  double front_length() const;
  double gamma_length() const;
  double gamma_minus_length() const { return domain_.perimeter() - gamma_length(); }

  bool in_front(const Point& on_boundary) const;
  /// Periodic arc distance from arc position `s` to the closed front set.
  double arc_distance_to_front(double s) const;
  bool in_gamma(const Point& on_boundary) const;
  /// Euclidean distance from `x` to the closure of the back side.
  double distance_to_back(const Point& x) const;

 private:
  friend BoundarySegmentation segment_boundary(const DomainSpec&, const Point&, double, int);
  BoundarySegmentation(const DomainSpec& domain) : domain_(domain) {}

  DomainSpec domain_;
  Point x0_;
  double gamma_margin_ = 0.0;
  std::vector<BoundaryNode> nodes_;
  std::vector<ArcInterval> front_;
  // Polyline of the closed back side used for distance queries.
  std::vector<std::vector<Point>> back_chains_;
};

/// True when x0 lies outside the closed convex hull of the domain.
bool outside_hull(const DomainSpec& domain, const Point& x0);

BoundarySegmentation segment_boundary(const DomainSpec& domain, const Point& x0,
                                      double gamma_margin, int samples = 2048);

/// Trusted subregion: interior nodes at least `margin` away from the back
/// side and within `pole_reach` of the pole. `eta` is the minimum of
/// (x0 - x).n(y) / |x - x0|^2 over masked x and front samples y whose
/// distance to the back side is at least `margin`.
struct TrustedRegion {
  Mask mask;
  double margin = 0.0;
  double pole_reach = 0.0;
  double eta = 0.0;
  int count = 0;
};

/// Default pole reach: distance from x0 to the domain plus a quarter diameter.
double default_pole_reach(const DomainSpec& domain, const Point& x0);

TrustedRegion trusted_region(const Grid& grid, const BoundarySegmentation& seg, double margin,
                             double pole_reach);
inline TrustedRegion trusted_region(const Grid& grid, const BoundarySegmentation& seg,
                                    double margin) {
  return trusted_region(grid, seg, margin, default_pole_reach(seg.domain(), seg.x0()));
}

/// Smallest R such that the domain lies in the ball of radius R tangent to
/// the boundary at every front sample; +inf for flat front pieces.
double tangent_ball_radius(const BoundarySegmentation& seg);

}  // namespace qpat
