#include "qpat/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qpat {
namespace {

bool front_test(const DomainSpec& domain, const Point& x0, const Point& y) {
  const auto n = domain.normal(y);
  return n && (x0 - y).dot(*n) > 0.0;
}

double segment_distance(const Point& x, const Point& a, const Point& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (x - (a + t * ab)).norm();
}

}  // namespace

bool outside_hull(const DomainSpec& domain, const Point& x0) {
  const int dirs = 720;
  const double tol = 1e-12 * domain.diameter();
  for (int k = 0; k < dirs; ++k) {
    const double a = 2.0 * std::numbers::pi * k / dirs;
    const Vec2 u(std::cos(a), std::sin(a));
    if (u.dot(x0) > domain.support(u) + tol) return true;
  }
  return false;
}

BoundarySegmentation segment_boundary(const DomainSpec& domain, const Point& x0,
                                      double gamma_margin, int samples) {
  require(outside_hull(domain, x0), ErrorKind::pole_placement,
          "pole must lie outside the closed convex hull of the domain");
  require(gamma_margin > 0.0, ErrorKind::config, "gamma margin must be positive");
  require(samples >= 64, ErrorKind::config, "too few boundary samples");

  BoundarySegmentation seg(domain);
  seg.x0_ = x0;
  seg.gamma_margin_ = gamma_margin;
  const double perimeter = domain.perimeter();
  auto front_at = [&](double s) { return front_test(domain, x0, domain.point_at_arc(s)); };

  std::vector<bool> flag(samples);
  for (int k = 0; k < samples; ++k) flag[k] = front_at(perimeter * k / samples);

  // Transition arc positions refined by bisection.
  auto refine = [&](int k) {
    double lo = perimeter * k / samples;
    double hi = perimeter * (k + 1) / samples;
    const bool f_lo = flag[k];
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (front_at(mid) == f_lo ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  std::vector<double> rises;
  std::vector<double> falls;
  for (int k = 0; k < samples; ++k) {
    const bool a = flag[k];
    const bool b = flag[(k + 1) % samples];
    if (!a && b) rises.push_back(refine(k));
    if (a && !b) falls.push_back(refine(k));
  }
  if (rises.empty()) {
    require(flag[0], ErrorKind::pole_placement, "pole sees no front boundary");
    seg.front_.push_back({0.0, perimeter});
  } else {
    for (double r : rises) {
      // Matching fall: first fall after r, cyclically.
      double best = std::numeric_limits<double>::infinity();
      for (double f : falls) {
        double len = f - r;
        if (len < 0.0) len += perimeter;
        best = std::min(best, len);
      }
      seg.front_.push_back({r, best});
    }
  }

  seg.nodes_.resize(samples);
  for (int k = 0; k < samples; ++k) {
    BoundaryNode& n = seg.nodes_[k];
    n.arc = perimeter * k / samples;
    n.x = domain.point_at_arc(n.arc);
    n.normal = domain.normal(n.x);
    n.in_front = front_test(domain, x0, n.x);
    n.in_gamma = n.normal && seg.arc_distance_to_front(n.arc) <= gamma_margin;
    n.in_gamma_minus = !n.in_gamma;
  }

  // Back side as polylines between consecutive front intervals.
  const int chain_samples = 4096;
  std::vector<ArcInterval> sorted = seg.front_;
  std::sort(sorted.begin(), sorted.end(),
            [](const ArcInterval& a, const ArcInterval& b) { return a.start < b.start; });
  for (size_t i = 0; i < sorted.size(); ++i) {
    const double s0 = sorted[i].start + sorted[i].length;
    double s1 = sorted[(i + 1) % sorted.size()].start;
    if (s1 <= s0) s1 += perimeter;
    if (sorted.size() == 1 && sorted[0].length >= perimeter) break;
    const int m = std::max(2, int(std::ceil((s1 - s0) / perimeter * chain_samples)));
    std::vector<Point> chain;
    for (int k = 0; k <= m; ++k) chain.push_back(domain.point_at_arc(s0 + (s1 - s0) * k / m));
    seg.back_chains_.push_back(std::move(chain));
  }
  return seg;
}

double BoundarySegmentation::front_length() const {
  double total = 0.0;
  for (const auto& iv : front_) total += iv.length;
  return std::min(total, domain_.perimeter());
}

double BoundarySegmentation::gamma_length() const {
  const double p = domain_.perimeter();
  std::vector<std::pair<double, double>> pieces;
  for (const auto& iv : front_) {
    const double a = iv.start - gamma_margin_;
    const double b = iv.start + iv.length + gamma_margin_;
    for (int m = -1; m <= 1; ++m) {
      const double lo = std::max(a + m * p, 0.0);
      const double hi = std::min(b + m * p, p);
      if (hi > lo) pieces.emplace_back(lo, hi);
    }
  }
  std::sort(pieces.begin(), pieces.end());
  double total = 0.0;
  double cur_lo = -1.0;
  double cur_hi = -1.0;
  for (const auto& [lo, hi] : pieces) {
    if (lo > cur_hi) {
      total += cur_hi - cur_lo;
      cur_lo = lo;
      cur_hi = hi;
    } else {
      cur_hi = std::max(cur_hi, hi);
    }
  }
  total += cur_hi - cur_lo;
  return std::min(total, p);
}

bool BoundarySegmentation::in_front(const Point& y) const { return front_test(domain_, x0_, y); }

double BoundarySegmentation::arc_distance_to_front(double s) const {
  const double p = domain_.perimeter();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& iv : front_) {
    double offset = std::fmod(s - iv.start, p);
    if (offset < 0.0) offset += p;
    if (offset <= iv.length) return 0.0;
    best = std::min(best, std::min(offset - iv.length, p - offset));
  }
  return best;
}

bool BoundarySegmentation::in_gamma(const Point& y) const {
  if (!domain_.normal(y)) return false;
  return arc_distance_to_front(domain_.arc_length(y)) <= gamma_margin_;
}

double BoundarySegmentation::distance_to_back(const Point& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& chain : back_chains_)
    for (size_t k = 0; k + 1 < chain.size(); ++k)
      best = std::min(best, segment_distance(x, chain[k], chain[k + 1]));
  return best;
}

double default_pole_reach(const DomainSpec& domain, const Point& x0) {
  return domain.signed_distance(x0) + 0.25 * domain.diameter();
}

TrustedRegion trusted_region(const Grid& grid, const BoundarySegmentation& seg, double margin,
                             double pole_reach) {
  require(margin > 2.0 * grid.h_max(), ErrorKind::precondition,
          "trusted margin must exceed two grid spacings");
  require(pole_reach > 0.0, ErrorKind::config, "pole reach must be positive");
  TrustedRegion tr;
  tr.margin = margin;
  tr.pole_reach = pole_reach;
  tr.mask = Mask::Constant(grid.size(), false);
  const DomainSpec& domain = seg.domain();
  for (int k : grid.interior_nodes()) {
    const Point x = grid.node(k);
    if ((x - seg.x0()).norm() > pole_reach) continue;
    if (-domain.signed_distance(x) < margin && seg.distance_to_back(x) < margin) continue;
    tr.mask[k] = true;
  }
  tr.count = count(tr.mask);
  require(tr.count > 0, ErrorKind::empty_region, "trusted region is empty");

  std::vector<const BoundaryNode*> eligible;
  for (const auto& n : seg.nodes())
    if (n.in_front && seg.distance_to_back(n.x) >= margin) eligible.push_back(&n);
  require(!eligible.empty(), ErrorKind::empty_region,
          "no front sample lies at the trusted margin from the back side");

  double eta = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid.size(); ++k) {
    if (!tr.mask[k]) continue;
    const Vec2 r = seg.x0() - grid.node(k);
    const double r2 = r.squaredNorm();
    for (const BoundaryNode* y : eligible) eta = std::min(eta, r.dot(*y->normal) / r2);
  }
  tr.eta = eta;
  return tr;
}

double tangent_ball_radius(const BoundarySegmentation& seg) {
  double worst = 0.0;
  const double tiny = 1e-12 * seg.domain().diameter();
  for (const auto& y : seg.nodes()) {
    if (!y.in_front) continue;
    for (const auto& x : seg.nodes()) {
      const Vec2 d = y.x - x.x;
      if (d.norm() <= tiny) continue;
      const double along = d.dot(*y.normal);
      if (along <= 0.0) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, d.squaredNorm() / (2.0 * along));
    }
  }
  return worst;
}

}  // namespace qpat
