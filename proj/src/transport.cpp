#include "qpat/transport.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>

#include "qpat/elliptic.hpp"
#include "qpat/parallel.hpp"

namespace qpat {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double branch_part(complexd v, Branch b) { return b == Branch::real_part ? v.real() : v.imag(); }

// Two full arms in every direction.
bool central_stencil(const Grid& g, int k) {
  for (int d = 0; d < 4; ++d) {
    int cur = k;
    for (int s = 0; s < 2; ++s) {
      if (!g.is_interior(cur) || g.arms(cur)[d].cut()) return false;
      cur = g.neighbor(cur, Dir(d));
    }
    if (!g.is_interior(cur)) return false;
  }
  return true;
}

struct State {
  Point p;
  double integral;
};

bool rk4(const TransportField& f, const State& s, double dt, State& out) {
  Vec2 b1, b2, b3, b4;
  double g1, g2, g3, g4;
  if (!f.eval(s.p, b1, g1)) return false;
  if (!f.eval(s.p + 0.5 * dt * b1, b2, g2)) return false;
  if (!f.eval(s.p + 0.5 * dt * b2, b3, g3)) return false;
  if (!f.eval(s.p + dt * b3, b4, g4)) return false;
  out.p = s.p + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
  out.integral = s.integral + dt / 6.0 * (g1 + 2.0 * g2 + 2.0 * g3 + g4);
  return true;
}

}  // namespace

TransportSettings TransportSettings::from_pair(const CGOPair& pair) {
  TransportSettings s;
  s.chi = [pair](const Point& x) { return pair.chi(x); };
  s.kappa = pair.kappa();
  s.chi_description = pair.chi_description();
  return s;
}

void extend_ghost(const Grid& grid, Eigen::VectorXd& values, int rings) {
  for (int r = 0; r < rings; ++r) {
    Eigen::VectorXd next = values;
    for (int k = 0; k < grid.size(); ++k) {
      if (std::isfinite(values[k])) continue;
      double acc = 0.0;
      int n = 0;
      for (int d = 0; d < 4; ++d) {
        const int n1 = grid.neighbor(k, Dir(d));
        if (n1 < 0 || !std::isfinite(values[n1])) continue;
        // Highest-order extrapolation the defined run along d supports.
        double v[4];
        int len = 0;
        for (int cur = n1; len < 4 && cur >= 0 && std::isfinite(values[cur]);
             cur = grid.neighbor(cur, Dir(d)))
          v[len++] = values[cur];
        switch (len) {
          case 1: acc += v[0]; break;
          case 2: acc += 2.0 * v[0] - v[1]; break;
          case 3: acc += 3.0 * v[0] - 3.0 * v[1] + v[2]; break;
          default: acc += 4.0 * v[0] - 6.0 * v[1] + 4.0 * v[2] - v[3]; break;
        }
        ++n;
      }
      if (n > 0) next[k] = acc / n;
    }
    values = std::move(next);
  }
}

bool TransportField::eval(const Point& x, Vec2& b, double& gamma_branch) const {
  if (analytic) {
    analytic(x, b, gamma_branch);
    return std::isfinite(b.x()) && std::isfinite(b.y()) && std::isfinite(gamma_branch);
  }
  b = Vec2(bicubic(*grid, bx, x), bicubic(*grid, by, x));
  gamma_branch = bicubic(*grid, g, x);
  return std::isfinite(b.x()) && std::isfinite(b.y()) && std::isfinite(gamma_branch);
}

bool TransportField::accepts(const Point& x) const {
  const Vec2 r = x - grid->origin();
  const int i = int(std::lround(r.x() / grid->dx()));
  const int j = int(std::lround(r.y() / grid->dy()));
  if (i < 0 || j < 0 || i >= grid->nx() || j >= grid->ny()) return false;
  return grid->domain().contains(x) && work[grid->index(i, j)];
}

TransportField build_transport_field(const InternalDataSet& data, const TransportSettings& settings,
                                     const TrustedRegion& trusted, const ScalarField* mu_truth) {
  require(data.d.size() >= 2, ErrorKind::precondition, "two complex data fields are required");
  require(bool(settings.chi), ErrorKind::config, "transport settings lack chi");
  const ComplexField& d1 = data.d[0];
  const ComplexField& d2 = data.d[1];
  d1.check_same(d2);
  const GridPtr& grid = d1.grid();
  const Grid& g = *grid;

  TransportField f;
  f.grid = grid;
  f.x0 = data.illum.cgo.empty() ? Point(2.0, 0.0) : data.illum.cgo[0].x0;
  f.region = trusted.mask;
  f.work = dilate(g, trusted.mask, 2);
  f.chi_used = settings.chi_description;
  f.beta = {ComplexField(grid), ComplexField(grid)};
  f.gamma = ComplexField(grid);

  // The field is formed on a wider support than the work mask so that the
  // lattice copy is only extrapolated across the domain boundary.
  const Mask support = dilate(g, trusted.mask, 6) && g.interior();
  const VectorField<complexd> g1 = gradient(d1, support);
  const VectorField<complexd> g2 = gradient(d2, support);
  const ComplexField l1 = laplacian(d1, support);
  const ComplexField l2 = laplacian(d2, support);
  ScalarField scale(grid);
  for (int k : g.interior_nodes()) {
    if (!support[k]) continue;
    const complexd w = settings.kappa * settings.chi(g.node(k));
    f.beta.x[k] = w * (d1[k] * g2.x[k] - d2[k] * g1.x[k]);
    f.beta.y[k] = w * (d1[k] * g2.y[k] - d2[k] * g1.y[k]);
    f.gamma[k] = -0.5 * w * (d1[k] * l2[k] - d2[k] * l1[k]);
    scale[k] = std::abs(w) * (std::abs(d1[k]) * std::hypot(std::abs(g2.x[k]), std::abs(g2.y[k])) +
                              std::abs(d2[k]) * std::hypot(std::abs(g1.x[k]), std::abs(g1.y[k])));
  }

  auto min_inward = [&](Branch b) {
    double m = std::numeric_limits<double>::infinity();
    for (int k : g.interior_nodes()) {
      if (!f.region[k]) continue;
      const Vec2 r = (f.x0 - g.node(k)).normalized();
      m = std::min(m, branch_part(f.beta.x[k], b) * r.x() + branch_part(f.beta.y[k], b) * r.y());
    }
    return m;
  };
  f.branch = settings.branch;
  if (settings.auto_branch)
    f.branch = min_inward(Branch::imag_part) > min_inward(Branch::real_part) ? Branch::imag_part
                                                                              : Branch::real_part;
  f.min_inward = min_inward(f.branch);

  f.bx = Eigen::VectorXd::Constant(g.size(), kNaN);
  f.by = Eigen::VectorXd::Constant(g.size(), kNaN);
  f.g = Eigen::VectorXd::Constant(g.size(), kNaN);
  f.min_branch_modulus = std::numeric_limits<double>::infinity();
  f.flatness = 0.0;
  for (int k : g.interior_nodes()) {
    if (!support[k]) continue;
    f.bx[k] = branch_part(f.beta.x[k], f.branch);
    f.by[k] = branch_part(f.beta.y[k], f.branch);
    f.g[k] = branch_part(f.gamma[k], f.branch);
    if (!f.region[k]) continue;
    const Vec2 b(f.bx[k], f.by[k]);
    const double nb = b.norm();
    require(std::isfinite(nb), ErrorKind::degenerate_field, "vector field is not finite");
    require(nb > settings.degenerate_tol * scale[k], ErrorKind::degenerate_field,
            "selected branch of beta vanishes in the trusted region");
    f.min_branch_modulus = std::min(f.min_branch_modulus, nb);
    const Vec2 r = f.x0 - g.node(k);
    f.flatness = std::max(f.flatness, std::acos(std::clamp(b.dot(r) / (nb * r.norm()), -1.0, 1.0)));
  }
  // Curves and mu depend only on the direction field and gamma/|b|; a unit
  // sup keeps the step control independent of the data scale.
  double unit = 0.0;
  for (int k : g.interior_nodes())
    if (f.region[k]) unit = std::max(unit, std::hypot(f.bx[k], f.by[k]));
  require(unit > 0.0 && std::isfinite(unit), ErrorKind::degenerate_field, "trusted region is empty");
  f.bx /= unit;
  f.by /= unit;
  f.g /= unit;
  f.min_branch_modulus /= unit;
  // One-sided stencils next to the boundary switch error structure; the
  // lattice field keeps only centrally differenced nodes and extrapolates.
  for (int k : g.interior_nodes()) {
    if (!f.work[k]) f.beta.x[k] = f.beta.y[k] = f.gamma[k] = nan_value<complexd>();
    if (support[k] && !central_stencil(g, k)) f.bx[k] = f.by[k] = f.g[k] = kNaN;
  }
  extend_ghost(g, f.bx, 6);
  extend_ghost(g, f.by, 6);
  extend_ghost(g, f.g, 6);

  if (mu_truth) {
    double num = 0.0;
    double den = 0.0;
    for (int k : g.interior_nodes()) {
      if (!f.region[k]) continue;
      const Vec2 r = f.x0 - g.node(k);
      const double m2 = (*mu_truth)[k] * (*mu_truth)[k];
      const Vec2 ref = m2 * r / r.squaredNorm();
      num = std::max(num, (Vec2(f.beta.x[k].real(), f.beta.y[k].real()) - ref).norm());
      den = std::max(den, ref.norm());
    }
    f.flatness_truth = num / den;
  }
  return f;
}

TransportField synthetic_transport_field(const GridPtr& grid, const Mask& region, const Point& x0,
                                         std::function<Vec2(const Point&)> beta,
                                         std::function<double(const Point&)> gamma,
                                         bool analytic) {
  const Grid& g = *grid;
  TransportField f;
  f.grid = grid;
  f.x0 = x0;
  f.region = region;
  f.work = region;
  f.chi_used = "synthetic";
  f.beta = {ComplexField(grid), ComplexField(grid)};
  f.gamma = ComplexField(grid);
  f.bx = Eigen::VectorXd::Constant(g.size(), kNaN);
  f.by = Eigen::VectorXd::Constant(g.size(), kNaN);
  f.g = Eigen::VectorXd::Constant(g.size(), kNaN);
  f.min_branch_modulus = std::numeric_limits<double>::infinity();
  for (int k : g.interior_nodes()) {
    const Vec2 b = beta(g.node(k));
    const double gm = gamma(g.node(k));
    f.beta.x[k] = b.x();
    f.beta.y[k] = b.y();
    f.gamma[k] = gm;
    f.bx[k] = b.x();
    f.by[k] = b.y();
    f.g[k] = gm;
    if (region[k]) f.min_branch_modulus = std::min(f.min_branch_modulus, b.norm());
  }
  extend_ghost(g, f.bx, 3);
  extend_ghost(g, f.by, 3);
  extend_ghost(g, f.g, 3);
  if (analytic)
    f.analytic = [beta, gamma](const Point& x, Vec2& b, double& gm) {
      b = beta(x);
      gm = gamma(x);
    };
  return f;
}

std::string_view to_string(TraceStatus s) {
  switch (s) {
    case TraceStatus::exited_front: return "exited_front";
    case TraceStatus::exited_elsewhere: return "exited_elsewhere";
    case TraceStatus::max_time: return "max_time";
  }
  return "unknown";
}

double max_flow_time(const TransportField& field, const TraceOptions& opts) {
  return opts.safety * field.grid->domain().diameter() / field.min_branch_modulus;
}

FlowTrace trace_characteristic(const TransportField& field, const Point& start,
                               const BoundarySegmentation& seg, const TraceOptions& opts) {
  require(field.accepts(start), ErrorKind::precondition,
          "trace must start inside the trusted region (or its halo)");
  const DomainSpec& domain = field.grid->domain();
  const double cell = std::min(field.grid->dx(), field.grid->dy());
  const double max_step = opts.max_step_cells * cell;
  const double t_max = max_flow_time(field, opts);

  FlowTrace tr;
  tr.start = start;
  if (opts.keep_path) tr.path.push_back(start);
  State s{start, 0.0};
  double t = 0.0;
  Vec2 b;
  double gm;
  if (!field.eval(start, b, gm) || b.norm() == 0.0) {
    tr.status = TraceStatus::exited_elsewhere;
    tr.x_plus = start;
    return tr;
  }
  double dt = 0.25 * max_step / b.norm();
  int rejects = 0;
  while (t < t_max) {
    field.eval(s.p, b, gm);
    dt = std::min(dt, max_step / std::max(b.norm(), 1e-300));
    State full, half, two;
    const bool ok = rk4(field, s, dt, full) && rk4(field, s, 0.5 * dt, half) &&
                    rk4(field, half, 0.5 * dt, two);
    if (!ok) {
      // Stage left the region carrying data: shrink, give up when tiny.
      dt *= 0.5;
      if (++rejects > 60) {
        tr.status = TraceStatus::exited_elsewhere;
        tr.x_plus = s.p;
        tr.t_plus = t;
        tr.gamma_integral = s.integral;
        return tr;
      }
      continue;
    }
    const double err =
        std::max((full.p - two.p).norm(), std::fabs(full.integral - two.integral)) / 15.0;
    if (err > opts.tol) {
      dt *= std::max(0.2, 0.9 * std::pow(opts.tol / err, 0.2));
      if (++rejects > 200) break;
      continue;
    }
    rejects = 0;
    if (domain.level(two.p) >= 0.0) {
      // Bisect the step fraction until the exit point is resolved.
      double lo = 0.0;
      double hi = 1.0;
      State out = two;
      const double speed = b.norm();
      while ((hi - lo) * dt * speed > opts.exit_tol) {
        const double mid = 0.5 * (lo + hi);
        State probe;
        if (!rk4(field, s, mid * dt, probe)) {
          hi = mid;
          continue;
        }
        if (domain.level(probe.p) < 0.0) {
          lo = mid;
        } else {
          hi = mid;
          out = probe;
        }
      }
      tr.x_plus = out.p;
      tr.t_plus = t + hi * dt;
      tr.gamma_integral = out.integral;
      tr.exit_arc = domain.arc_length(out.p);
      tr.steps++;
      if (opts.keep_path) tr.path.push_back(out.p);
      const Point on = domain.point_at_arc(tr.exit_arc);
      tr.status = seg.in_front(on) && seg.in_gamma(on) ? TraceStatus::exited_front
                                                       : TraceStatus::exited_elsewhere;
      return tr;
    }
    s = two;
    t += dt;
    tr.steps++;
    if (opts.keep_path) tr.path.push_back(s.p);
    dt *= std::min(2.0, 0.9 * std::pow(opts.tol / std::max(err, 1e-300), 0.2));
  }
  tr.status = TraceStatus::max_time;
  tr.x_plus = s.p;
  tr.t_plus = t;
  tr.gamma_integral = s.integral;
  require(!opts.require_exit, ErrorKind::non_exiting_trace,
          "characteristic did not reach the boundary within the time guard");
  return tr;
}

Eigen::VectorXd boundary_mu0(const InternalDataSet& data, double threshold) {
  require(!data.d.empty() && data.d.size() == data.illum.g.size(), ErrorKind::precondition,
          "data and illuminations must be index-aligned");
  const Grid& g = *data.d[0].grid();
  const int nb = g.boundary_size();
  std::vector<double> gmax(data.d.size(), 0.0);
  for (size_t j = 0; j < data.d.size(); ++j) {
    require(data.illum.g[j].size() == nb, ErrorKind::precondition,
            "illumination length differs from the boundary point count");
    gmax[j] = data.illum.g[j].cwiseAbs().maxCoeff();
  }
  Eigen::VectorXd mu0 = Eigen::VectorXd::Constant(nb, kNaN);
  for (int b = 0; b < nb; ++b) {
    complexd num = 0.0;
    double den = 0.0;
    for (size_t j = 0; j < data.d.size(); ++j) {
      const complexd gj = data.illum.g[j][b];
      if (gmax[j] == 0.0 || std::abs(gj) <= threshold * gmax[j]) continue;
      num += std::conj(gj) * data.d[j].boundary()[b];
      den += std::norm(gj);
    }
    if (den > 0.0) mu0[b] = num.real() / den;
  }
  return mu0;
}

double interpolate_boundary(const Grid& grid, const Eigen::VectorXd& values, double arc) {
  const auto& pts = grid.boundary();
  const int nb = int(pts.size());
  if (nb == 0) return kNaN;
  const double p = grid.domain().perimeter();
  arc = std::fmod(arc, p);
  if (arc < 0.0) arc += p;
  const auto it = std::upper_bound(pts.begin(), pts.end(), arc,
                                   [](double s, const BoundaryPoint& bp) { return s < bp.arc; });
  const int hi = int(it - pts.begin()) % nb;
  const int lo = (hi - 1 + nb) % nb;
  double span = pts[hi].arc - pts[lo].arc;
  double off = arc - pts[lo].arc;
  if (span <= 0.0) span += p;
  if (off < 0.0) off += p;
  const double w = span > 0.0 ? off / span : 0.0;
  if (w <= 1e-14) return values[lo];
  if (w >= 1.0 - 1e-14) return values[hi];
  const double linear = (1.0 - w) * values[lo] + w * values[hi];
  if (nb < 4) return linear;
  // Cubic Lagrange through the two points on either side, in unwrapped arc.
  const int idx[4] = {(lo - 1 + nb) % nb, lo, hi, (hi + 1) % nb};
  double s[4];
  s[1] = 0.0;
  s[0] = pts[idx[1]].arc - pts[idx[0]].arc;
  if (s[0] <= 0.0) s[0] += p;
  s[0] = -s[0];
  s[2] = span;
  s[3] = pts[idx[3]].arc - pts[idx[2]].arc;
  if (s[3] <= 0.0) s[3] += p;
  s[3] += span;
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    if (!std::isfinite(values[idx[a]])) return linear;
    double l = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) l *= (off - s[b]) / (s[a] - s[b]);
    acc += l * values[idx[a]];
  }
  return acc;
}

MuResult reconstruct_mu(const TransportField& field, const InternalDataSet& data,
                        const BoundarySegmentation& seg, const TraceOptions& opts) {
  const GridPtr& grid = field.grid;
  const Grid& g = *grid;
  MuResult res;
  res.mu0_boundary = boundary_mu0(data);
  res.mu = ScalarField(grid);
  res.exit_time = ScalarField(grid);
  res.exit_arc = ScalarField(grid);
  res.gamma_integral = ScalarField(grid);

  std::vector<int> nodes;
  for (int k : g.interior_nodes())
    if (field.work[k]) nodes.push_back(k);
  std::vector<FlowTrace> traces(nodes.size());
  TraceOptions topts = opts;
  topts.require_exit = false;
  topts.keep_path = false;
  parallel_for(int(nodes.size()),
               [&](int i) { traces[i] = trace_characteristic(field, g.node(nodes[i]), seg, topts); });

  int covered = 0;
  int missing_data = 0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    const int k = nodes[i];
    const FlowTrace& tr = traces[i];
    res.exit_time[k] = tr.t_plus;
    res.exit_arc[k] = tr.exit_arc;
    res.gamma_integral[k] = tr.gamma_integral;
    if (tr.status != TraceStatus::exited_front) {
      res.uncovered.push_back(k);
      continue;
    }
    const double mu0 = interpolate_boundary(g, res.mu0_boundary, tr.exit_arc);
    if (!std::isfinite(mu0)) {
      ++missing_data;
      continue;
    }
    res.mu[k] = mu0 * std::exp(tr.gamma_integral);
    ++covered;
  }
  res.coverage = nodes.empty() ? 0.0 : double(covered) / double(nodes.size());
  if (!res.uncovered.empty())
    throw CoverageError(res.uncovered, std::to_string(res.uncovered.size()) + " of " +
                                           std::to_string(nodes.size()) +
                                           " nodes have characteristics that miss the front");
  require(missing_data == 0, ErrorKind::boundary_data,
          "illuminations vanish at the exit point of some characteristics");

  // Residual of the unused branch as a consistency diagnostic.
  res.mu.boundary() = res.mu0_boundary;
  try {
    const VectorField<double> gm = gradient(res.mu, field.region);
    const Branch other = field.branch == Branch::real_part ? Branch::imag_part : Branch::real_part;
    double worst = 0.0;
    double scale = 0.0;
    for (int k : g.interior_nodes()) {
      if (!field.region[k]) continue;
      const double ox = branch_part(field.beta.x[k], other);
      const double oy = branch_part(field.beta.y[k], other);
      const double og = branch_part(field.gamma[k], other);
      const double r = ox * gm.x[k] + oy * gm.y[k] + og * res.mu[k];
      const double s = std::hypot(ox, oy) * std::hypot(gm.x[k], gm.y[k]) + std::fabs(og * res.mu[k]);
      worst = std::max(worst, std::fabs(r));
      scale = std::max(scale, s);
    }
    res.other_branch_residual = scale > 0.0 ? worst / scale : 0.0;
  } catch (const Error&) {
    res.other_branch_residual = kNaN;
  }
  return res;
}

GradientSystem build_gradient_system(const std::vector<TransportField>& fields, double det_tol) {
  require(fields.size() == 2, ErrorKind::precondition,
          "the planar gradient system needs exactly two poles");
  const GridPtr& grid = fields[0].grid;
  require(grid == fields[1].grid, ErrorKind::precondition, "per-pole fields need a common grid");
  const Grid& g = *grid;
  GradientSystem sys;
  sys.grid = grid;
  sys.trusted = fields[0].region && fields[1].region;
  sys.region = fields[0].work && fields[1].work;
  require(count(sys.trusted) > 0, ErrorKind::empty_region, "per-pole trusted regions are disjoint");
  sys.lambda = {ScalarField(grid), ScalarField(grid)};
  sys.min_det = std::numeric_limits<double>::infinity();
  sys.min_normalized_det = std::numeric_limits<double>::infinity();
  for (int k : g.interior_nodes()) {
    if (!sys.region[k]) continue;
    Eigen::Matrix2d B;
    B << fields[0].bx[k], fields[0].by[k], fields[1].bx[k], fields[1].by[k];
    const Eigen::Vector2d gv(fields[0].g[k], fields[1].g[k]);
    const double det = B(0, 0) * B(1, 1) - B(0, 1) * B(1, 0);
    const double norm = B.row(0).norm() * B.row(1).norm();
    if (sys.trusted[k]) {
      sys.min_det = std::min(sys.min_det, std::fabs(det));
      sys.min_normalized_det = std::min(sys.min_normalized_det, norm > 0 ? std::fabs(det) / norm : 0.0);
    }
    if (det == 0.0) continue;
    const Eigen::Vector2d lam(( B(1, 1) * gv.x() - B(0, 1) * gv.y()) / det,
                              (-B(1, 0) * gv.x() + B(0, 0) * gv.y()) / det);
    sys.lambda.x[k] = lam.x();
    sys.lambda.y[k] = lam.y();
  }
  require(sys.min_normalized_det >= det_tol, ErrorKind::ill_conditioned,
          "per-pole vector fields are nearly parallel somewhere in the trusted region");
  return sys;
}

MuResult reconstruct_mu_gradient(const GradientSystem& system, const Eigen::VectorXd& mu0_boundary,
                                 double curl_tol) {
  const GridPtr& grid = system.grid;
  const Grid& g = *grid;
  std::vector<int> unknown(g.size(), -1);
  std::vector<int> nodes;
  for (int k : g.interior_nodes()) {
    if (!system.region[k] || !std::isfinite(system.lambda.x[k])) continue;
    unknown[k] = int(nodes.size());
    nodes.push_back(k);
  }
  const int n = int(nodes.size());
  require(n > 0, ErrorKind::empty_region, "gradient system has no nodes");

  std::vector<Eigen::Triplet<double>> rows;
  std::vector<double> rhs;
  int anchors = 0;
  for (int k : nodes) {
    const Vec2 lk(system.lambda.x[k], system.lambda.y[k]);
    for (Dir d : {east, north, west, south}) {
      const Arm& arm = g.arms(k)[d];
      if (arm.cut()) {
        const double m0 = mu0_boundary.size() ? mu0_boundary[arm.bpoint] : kNaN;
        if (!std::isfinite(m0) || m0 <= 0.0) continue;
        const Vec2 step = g.boundary()[arm.bpoint].x - g.node(k);
        const int r = int(rhs.size());
        rows.emplace_back(r, unknown[k], 1.0);
        rhs.push_back(std::log(m0) + lk.dot(step));
        ++anchors;
        continue;
      }
      if (d == west || d == south) continue;
      const int nb = g.neighbor(k, d);
      if (unknown[nb] < 0) continue;
      const Vec2 ln(system.lambda.x[nb], system.lambda.y[nb]);
      const int r = int(rhs.size());
      rows.emplace_back(r, unknown[nb], 1.0);
      rows.emplace_back(r, unknown[k], -1.0);
      rhs.push_back(-0.5 * (lk + ln).dot(g.node(nb) - g.node(k)));
    }
  }
  require(anchors > 0, ErrorKind::boundary_data, "no boundary anchor carries mu0");
  Eigen::SparseMatrix<double> E(int(rhs.size()), n);
  E.setFromTriplets(rows.begin(), rows.end());
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), Eigen::Index(rhs.size()));
  const Eigen::SparseMatrix<double> M = E.transpose() * E;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(M);
  require(ldlt.info() == Eigen::Success, ErrorKind::solver,
          "gradient least-squares system is singular (disconnected region without anchors)");
  const Eigen::VectorXd ell = ldlt.solve(E.transpose() * b);
  require(ell.allFinite(), ErrorKind::solver, "gradient least-squares solve failed");

  MuResult res;
  res.mu = ScalarField(grid);
  res.mu0_boundary = mu0_boundary;
  res.anchors = anchors;
  for (int i = 0; i < n; ++i) res.mu[nodes[i]] = std::exp(ell[i]);
  res.coverage = 1.0;

  double curl = 0.0;
  for (int k : nodes) {
    const int e = g.neighbor(k, east), w = g.neighbor(k, west);
    const int nn = g.neighbor(k, north), s = g.neighbor(k, south);
    if (unknown[e] < 0 || unknown[w] < 0 || unknown[nn] < 0 || unknown[s] < 0) continue;
    if (g.arms(k)[east].cut() || g.arms(k)[west].cut() || g.arms(k)[north].cut() ||
        g.arms(k)[south].cut())
      continue;
    const double dly = (system.lambda.y[e] - system.lambda.y[w]) / (2.0 * g.dx());
    const double dlx = (system.lambda.x[nn] - system.lambda.x[s]) / (2.0 * g.dy());
    curl = std::max(curl, std::fabs(dly - dlx));
  }
  res.max_curl = curl;
  res.curl_flag = curl > curl_tol;
  return res;
}

}  // namespace qpat
