#include "qpat/forward.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace qpat {

double GaussianSum::value(const Point& x) const {
  double v = base;
  for (const Bump& b : bumps) v += b.amp * std::exp(-b.k * (x - b.center).squaredNorm());
  return v;
}

Vec2 GaussianSum::grad(const Point& x) const {
  Vec2 g = Vec2::Zero();
  for (const Bump& b : bumps) {
    const Vec2 r = x - b.center;
    g += -2.0 * b.k * b.amp * std::exp(-b.k * r.squaredNorm()) * r;
  }
  return g;
}

double GaussianSum::laplacian(const Point& x) const {
  double l = 0.0;
  for (const Bump& b : bumps) {
    const Vec2 r = x - b.center;
    const double e = std::exp(-b.k * r.squaredNorm());
    l += b.amp * e * (4.0 * b.k * b.k * r.squaredNorm() - 4.0 * b.k);
  }
  return l;
}

double CoefficientModel::sqrt_D(const Point& x) const { return std::sqrt(D.value(x)); }

double CoefficientModel::laplacian_sqrt_D(const Point& x) const {
  const double s = sqrt_D(x);
  return D.laplacian(x) / (2.0 * s) - D.grad(x).squaredNorm() / (4.0 * s * s * s);
}

double CoefficientModel::q(const Point& x) const {
  return -laplacian_sqrt_D(x) / sqrt_D(x) - sigma_a.value(x) / D.value(x);
}

double CoefficientModel::mu(const Point& x) const { return sigma_a.value(x) / sqrt_D(x); }

CoefficientPair CoefficientModel::sample(const GridPtr& grid) const {
  CoefficientPair c;
  c.D = ScalarField::sample(grid, [&](const Point& x) { return D.value(x); });
  c.sigma_a = ScalarField::sample(grid, [&](const Point& x) { return sigma_a.value(x); });
  c.G = ScalarField::sample(grid, [&](const Point& x) { return G.value(x); });
  return c;
}

CoefficientModel scenario(const std::string& name) {
  CoefficientModel m;
  m.name = name;
  if (name == "constant") {
    m.D = {1.0, {}};
    m.sigma_a = {0.2, {}};
  } else if (name == "gaussian-bump") {
    m.D = {1.0, {{0.3, 5.0, Point(0.4, 0.0)}}};
    m.sigma_a = {0.1, {{0.05, 8.0, Point(0.6, 0.2)}}};
  } else if (name == "two-inclusion") {
    m.D = {1.0, {{0.25, 20.0, Point(0.45, 0.3)}, {0.2, 20.0, Point(0.5, -0.3)}}};
    m.sigma_a = {0.1, {{0.06, 25.0, Point(0.55, -0.2)}, {0.04, 25.0, Point(0.4, 0.35)}}};
  } else {
    throw Error(ErrorKind::config, "unknown coefficient scenario '" + name + "'");
  }
  return m;
}

std::vector<std::string> scenario_names() { return {"constant", "gaussian-bump", "two-inclusion"}; }

LiouvilleFields liouville_forward(const CoefficientPair& coeffs) {
  const GridPtr& grid = coeffs.D.grid();
  coeffs.D.check_same(coeffs.sigma_a);
  for (int k : grid->interior_nodes())
    require(std::isfinite(coeffs.D[k]) && coeffs.D[k] > 0.0, ErrorKind::nonpositive_coefficient,
            "diffusion coefficient must be positive");
  require(coeffs.D.has_boundary(), ErrorKind::precondition,
          "diffusion coefficient needs boundary values");
  require((coeffs.D.boundary().array() > 0.0).all(), ErrorKind::nonpositive_coefficient,
          "diffusion coefficient must be positive on the boundary");
  const ScalarField s = map(coeffs.D, [](double v) { return std::sqrt(v); });
  const ScalarField lap = apply_laplacian(s);
  LiouvilleFields out{ScalarField(grid), ScalarField(grid), std::numeric_limits<double>::infinity(), 0.0};
  for (int k : grid->interior_nodes()) {
    out.q[k] = -lap[k] / s[k] - coeffs.sigma_a[k] / coeffs.D[k];
    out.mu[k] = coeffs.sigma_a[k] / s[k];
    out.mu_min = std::min(out.mu_min, out.mu[k]);
    out.mu_max = std::max(out.mu_max, out.mu[k]);
  }
  out.mu.boundary() = coeffs.sigma_a.boundary().array() / s.boundary().array();
  return out;
}

namespace {

InternalDataSet solve_all(const CoefficientPair& c, const IlluminationSet& illum,
                          const std::vector<Eigen::VectorXcd>& traces,
                          const LinearSolveOptions& opts) {
  const GridPtr& grid = c.D.grid();
  require(c.D.has_boundary(), ErrorKind::precondition, "D needs boundary values");
  for (int k : grid->interior_nodes())
    require(std::isfinite(c.D[k]) && c.D[k] > 0.0 && std::isfinite(c.sigma_a[k]) &&
                c.sigma_a[k] >= 0.0,
            ErrorKind::nonpositive_coefficient, "coefficients outside the admissible set");
  EllipticSolver solver(assemble_operator(grid, grid->interior(), &c.D, c.sigma_a), opts);
  InternalDataSet data;
  data.illum = illum;
  for (const auto& g : traces) {
    require(g.size() == grid->boundary_size(), ErrorKind::precondition,
            "illumination length differs from the boundary point count");
    ComplexField known(grid);
    known.boundary() = g.array() / c.D.boundary().array().sqrt().cast<complexd>();
    ComplexField u = solver.solve(known);
    ComplexField d(grid);
    for (int k : grid->interior_nodes()) d[k] = c.G[k] * c.sigma_a[k] * u[k];
    d.boundary() = u.boundary().array() *
                   (c.G.boundary().array() * c.sigma_a.boundary().array()).cast<complexd>();
    data.d.push_back(std::move(d));
  }
  return data;
}

}  // namespace

InternalDataSet simulate_data(const CoefficientPair& coeffs, const IlluminationSet& illum,
                              const LinearSolveOptions& opts) {
  return solve_all(coeffs, illum, illum.g, opts);
}

InternalDataSet simulate_data(const CoefficientModel& model, const IlluminationSet& illum,
                              const BoundarySegmentation& seg, const GridPtr& target,
                              const SimulationOptions& opts) {
  require(opts.refine >= 1, ErrorKind::config, "refinement factor must be at least 1");
  const int r = opts.refine;
  const GridPtr fine = r == 1 ? target
                              : Grid::build(target->domain(), (target->nx() - 1) * r + 1,
                                            (target->ny() - 1) * r + 1);
  std::vector<Eigen::VectorXcd> traces;
  for (size_t j = 0; j < illum.cgo.size(); ++j) traces.push_back(illum.trace(int(j), *fine, seg));
  const InternalDataSet fine_data = solve_all(model.sample(fine), illum, traces, opts.solver);

  InternalDataSet data;
  data.illum = illum;
  for (size_t j = 0; j < fine_data.d.size(); ++j) {
    ComplexField d(target);
    for (int k : target->interior_nodes()) {
      const int kf = fine->index(r * target->col(k), r * target->row(k));
      require(fine->is_interior(kf), ErrorKind::solver,
              "refined grid lost a coarse interior node");
      d[k] = fine_data.d[j][kf];
    }
    for (int b = 0; b < target->boundary_size(); ++b) {
      const Point& y = target->boundary()[b].x;
      d.boundary()[b] =
          model.G.value(y) * model.sigma_a.value(y) / model.sqrt_D(y) * illum.g[j][b];
    }
    data.d.push_back(std::move(d));
  }
  return data;
}

InternalDataSet remove_grueneisen(const InternalDataSet& data, const ScalarField& G) {
  InternalDataSet out = data;
  for (auto& d : out.d) {
    d.check_same(to_complex(G));
    for (int k : d.grid()->interior_nodes()) {
      require(G[k] > 0.0, ErrorKind::nonpositive_coefficient, "Grueneisen factor must be positive");
      d[k] /= G[k];
    }
    if (G.boundary().size()) d.boundary().array() /= G.boundary().array().cast<complexd>();
  }
  return out;
}

double uniform_pm1(std::uint64_t raw) {
  return double(raw >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

InternalDataSet add_noise(const InternalDataSet& data, double delta, std::uint64_t seed,
                          NoiseKind kind) {
  require(delta >= 0.0, ErrorKind::config, "noise level must be non-negative");
  InternalDataSet out = data;
  out.noise_level = delta;
  out.seed = seed;
  out.achieved_ratio = 0.0;
  if (delta == 0.0) return out;
  std::mt19937_64 rng(seed);
  constexpr int modes = 4;
  for (auto& d : out.d) {
    const Grid& g = *d.grid();
    const double dnorm = std::max(max_abs(d, g.interior()), d.boundary().cwiseAbs().maxCoeff());
    ComplexField p(d.grid());
    if (kind == NoiseKind::white) {
      for (int k : g.interior_nodes()) p[k] = complexd(uniform_pm1(rng()), uniform_pm1(rng()));
      for (int b = 0; b < g.boundary_size(); ++b)
        p.boundary()[b] = complexd(uniform_pm1(rng()), uniform_pm1(rng()));
      const double pn = std::max(max_abs(p, g.interior()), p.boundary().cwiseAbs().maxCoeff());
      p *= complexd(delta * dnorm / pn);
    } else {
      const Point lo = g.domain().box_min();
      const Vec2 len = g.domain().box_max() - lo;
      complexd c[modes][modes];
      for (int m = 0; m < modes; ++m)
        for (int n = 0; n < modes; ++n) {
          const double re = uniform_pm1(rng());
          const double im = uniform_pm1(rng());
          c[m][n] = complexd(re, im) / double(1 + m * m + n * n);
        }
      const double pi = std::numbers::pi;
      auto eval = [&](const Point& x, complexd& v, complexd& vx, complexd& vy) {
        const double xi = (x.x() - lo.x()) / len.x();
        const double eta = (x.y() - lo.y()) / len.y();
        v = vx = vy = 0.0;
        for (int m = 0; m < modes; ++m)
          for (int n = 0; n < modes; ++n) {
            const double cx = std::cos(m * pi * xi), sx = std::sin(m * pi * xi);
            const double cy = std::cos(n * pi * eta), sy = std::sin(n * pi * eta);
            v += c[m][n] * cx * cy;
            vx += c[m][n] * (-m * pi / len.x()) * sx * cy;
            vy += c[m][n] * (-n * pi / len.y()) * cx * sy;
          }
      };
      const double ell = std::min(len.x(), len.y()) / (pi * (modes - 1));
      double sup = 0.0;
      double grad_sup = 0.0;
      complexd v, vx, vy;
      for (int k : g.interior_nodes()) {
        eval(g.node(k), v, vx, vy);
        p[k] = v;
        sup = std::max(sup, std::abs(v));
        grad_sup = std::max(grad_sup, std::hypot(std::abs(vx), std::abs(vy)));
      }
      for (int b = 0; b < g.boundary_size(); ++b) {
        eval(g.boundary()[b].x, v, vx, vy);
        p.boundary()[b] = v;
        sup = std::max(sup, std::abs(v));
      }
      p *= complexd(delta * dnorm / std::max(sup, ell * grad_sup));
    }
    for (int k : g.interior_nodes()) d[k] += p[k];
    d.boundary() += p.boundary();
    const double pn = std::max(max_abs(p, g.interior()), p.boundary().cwiseAbs().maxCoeff());
    out.achieved_ratio = std::max(out.achieved_ratio, pn / dnorm);
  }
  return out;
}

}  // namespace qpat
