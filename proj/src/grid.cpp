#include "qpat/grid.hpp"

#include <algorithm>
#include <cmath>

namespace qpat {
namespace {

const Vec2 kUnit[4] = {Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1)};

// Fraction t in (0, 1] where p + t*step leaves the domain; level(p) < 0.
double crossing(const DomainSpec& domain, const Point& p, const Vec2& step) {
  double lo = 0.0;
  double hi = 1.0;
  if (domain.level(p + step) == 0.0) return 1.0;
  for (int it = 0; it < 80 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (domain.level(p + mid * step) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Grid::Grid(const DomainSpec& domain, int nx, int ny) : domain_(domain), nx_(nx), ny_(ny) {}

std::shared_ptr<const Grid> Grid::build(const DomainSpec& domain, int nx, int ny) {
  require(nx >= 3 && ny >= 3, ErrorKind::config, "grid needs at least 3 nodes per axis");
  auto g = std::shared_ptr<Grid>(new Grid(domain, nx, ny));
  const Point lo = domain.box_min();
  const Point hi = domain.box_max();
  g->origin_ = lo;
  g->dx_ = (hi.x() - lo.x()) / (nx - 1);
  g->dy_ = (hi.y() - lo.y()) / (ny - 1);

  const int n = nx * ny;
  g->interior_ = Mask::Constant(n, false);
  for (int k = 0; k < n; ++k) {
    const int i = g->col(k);
    const int j = g->row(k);
    if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) continue;
    if (domain.contains(g->node(k))) {
      g->interior_[k] = true;
      g->interior_nodes_.push_back(k);
    }
  }
  require(!g->interior_nodes_.empty(), ErrorKind::invalid_domain, "grid has no interior node");

  // Cut points, later deduplicated and sorted by arc length.
  struct Cut {
    int node;
    int dir;
    Point x;
    double arc;
  };
  std::vector<Cut> cuts;
  g->arms_.assign(n, {});
  for (int k : g->interior_nodes_) {
    for (int d = 0; d < 4; ++d) {
      const int nb = g->neighbor(k, Dir(d));
      if (g->is_interior(nb)) continue;
      const Vec2 step = g->spacing(Dir(d)) * kUnit[d];
      const double t = crossing(domain, g->node(k), step);
      const Point x = g->node(k) + t * step;
      g->arms_[k][d].theta = t;
      cuts.push_back({k, d, x, domain.arc_length(x)});
    }
  }
  std::vector<int> order(cuts.size());
  for (size_t c = 0; c < cuts.size(); ++c) order[c] = int(c);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return cuts[a].arc < cuts[b].arc; });

  const double tol = 1e-12 * domain.diameter();
  for (int c : order) {
    const Cut& cut = cuts[c];
    int b = -1;
    if (!g->boundary_.empty() && (g->boundary_.back().x - cut.x).norm() <= tol) {
      b = int(g->boundary_.size()) - 1;
    } else if (!g->boundary_.empty() && (g->boundary_.front().x - cut.x).norm() <= tol) {
      b = 0;
    } else {
      g->boundary_.push_back({cut.x, cut.arc, domain.normal(cut.x)});
      b = int(g->boundary_.size()) - 1;
    }
    g->arms_[cut.node][cut.dir].bpoint = b;
  }
  return g;
}

int Grid::neighbor(int k, Dir d) const {
  const int i = col(k);
  const int j = row(k);
  switch (d) {
    case east: return i + 1 < nx_ ? k + 1 : -1;
    case west: return i > 0 ? k - 1 : -1;
    case north: return j + 1 < ny_ ? k + nx_ : -1;
    case south: return j > 0 ? k - nx_ : -1;
  }
  return -1;
}

Mask interior_mask(const Grid& grid) { return grid.interior(); }

Mask dilate(const Grid& grid, const Mask& mask, int rings) {
  Mask cur = mask;
  for (int r = 0; r < rings; ++r) {
    Mask next = cur;
    for (int k : grid.interior_nodes()) {
      if (cur[k]) continue;
      for (int d = 0; d < 4; ++d) {
        const int nb = grid.neighbor(k, Dir(d));
        if (nb >= 0 && cur[nb]) {
          next[k] = true;
          break;
        }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

int count(const Mask& mask) { return int(mask.count()); }

double bilinear(const Grid& grid, const Eigen::VectorXd& nodes, const Point& x) {
  const Vec2 r = x - grid.origin();
  const double fx = r.x() / grid.dx();
  const double fy = r.y() / grid.dy();
  const int i = std::clamp(int(std::floor(fx)), 0, grid.nx() - 2);
  const int j = std::clamp(int(std::floor(fy)), 0, grid.ny() - 2);
  const double tx = fx - i;
  const double ty = fy - j;
  const double w[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
  const int k[4] = {grid.index(i, j), grid.index(i + 1, j), grid.index(i, j + 1),
                    grid.index(i + 1, j + 1)};
  double acc = 0.0;
  double wsum = 0.0;
  for (int c = 0; c < 4; ++c) {
    if (!std::isfinite(nodes[k[c]])) continue;
    acc += w[c] * nodes[k[c]];
    wsum += w[c];
  }
  if (wsum <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return acc / wsum;
}

double bicubic(const Grid& grid, const Eigen::VectorXd& nodes, const Point& x) {
  const Vec2 r = x - grid.origin();
  const double fx = r.x() / grid.dx();
  const double fy = r.y() / grid.dy();
  if (grid.nx() < 4 || grid.ny() < 4) return bilinear(grid, nodes, x);
  const int i0 = std::clamp(int(std::floor(fx)) - 1, 0, grid.nx() - 4);
  const int j0 = std::clamp(int(std::floor(fy)) - 1, 0, grid.ny() - 4);
  auto weights = [](double t, double w[4]) {
    // Nodes at 0, 1, 2, 3.
    w[0] = -(t - 1) * (t - 2) * (t - 3) / 6.0;
    w[1] = t * (t - 2) * (t - 3) / 2.0;
    w[2] = -t * (t - 1) * (t - 3) / 2.0;
    w[3] = t * (t - 1) * (t - 2) / 6.0;
  };
  double wx[4], wy[4];
  weights(fx - i0, wx);
  weights(fy - j0, wy);
  double acc = 0.0;
  for (int b = 0; b < 4; ++b) {
    double row = 0.0;
    for (int a = 0; a < 4; ++a) {
      const double v = nodes[grid.index(i0 + a, j0 + b)];
      if (!std::isfinite(v)) return bilinear(grid, nodes, x);
      row += wx[a] * v;
    }
    acc += wy[b] * row;
  }
  return acc;
}

}  // namespace qpat
