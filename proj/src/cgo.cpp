#include "qpat/cgo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "qpat/elliptic.hpp"

namespace qpat {
namespace {

constexpr double kOverflowLimit = 700.0;

Vec2 perp(const Vec2& v) { return Vec2(-v.y(), v.x()); }

bool psi_smooth_on(const DomainSpec& domain, const Point& x0, const Vec2& omega) {
  const Vec2 u = perp(omega);
  const double tol = 1e-12 * domain.diameter();
  return domain.support(u) < u.dot(x0) - tol || domain.support(-u) < -u.dot(x0) - tol;
}

}  // namespace

void validate(const CGOConfig& cfg, const DomainSpec& domain) {
  require(std::fabs(cfg.omega.norm() - 1.0) <= 1e-12, ErrorKind::config, "omega must be a unit vector");
  require(cfg.h > 0.0 && cfg.h < 1.0, ErrorKind::config, "h must lie in (0, 1)");
  require(cfg.cutoff_width > 0.0, ErrorKind::config, "cutoff width must be positive");
  require(outside_hull(domain, cfg.x0), ErrorKind::pole_placement,
          "pole must lie outside the closed convex hull of the domain");
}

double phase_phi(const Point& x0, const Point& x) { return std::log((x - x0).norm()); }

double phase_psi(const Point& x0, const Vec2& omega, const Point& x) {
  const Vec2 e = (x - x0).normalized();
  return std::acos(std::clamp(e.dot(omega), -1.0, 1.0));
}

Vec2 grad_phi(const Point& x0, const Point& x) {
  const Vec2 r = x - x0;
  return r / r.squaredNorm();
}

Vec2 grad_psi(const Point& x0, const Vec2& omega, const Point& x) {
  const Vec2 r = x - x0;
  const double rn = r.norm();
  const Vec2 e = r / rn;
  const Vec2 t = omega - e.dot(omega) * e;
  return -t / (rn * t.norm());
}

Vec2 default_omega(const DomainSpec& domain, const Point& x0) {
  const Vec2 d = (domain.center() - x0).normalized();
  return Vec2(d.y(), -d.x());
}

double min_h_for_dynamic_range(const DomainSpec& domain, const Point& x0, double ratio) {
  const double r_min = domain.signed_distance(x0);
  require(r_min > 0.0, ErrorKind::pole_placement, "pole must lie outside the domain");
  double r_max = 0.0;
  const int n = 4096;
  for (int k = 0; k < n; ++k)
    r_max = std::max(r_max, (domain.point_at_arc(domain.perimeter() * k / n) - x0).norm());
  return std::log(r_max / r_min) / std::log(ratio);
}

CGOPhasePair build_phases(const CGOConfig& cfg, const GridPtr& grid) {
  const Grid& g = *grid;
  const double tiny = 1e-12 * g.domain().diameter();
  for (int k : g.interior_nodes())
    require((g.node(k) - cfg.x0).norm() > tiny, ErrorKind::singular_phase,
            "grid node coincides with the pole");
  require(psi_smooth_on(g.domain(), cfg.x0, cfg.omega), ErrorKind::singular_phase,
          "the line through x0 along omega meets the domain, psi is not smooth there");
  CGOPhasePair p;
  p.phi = ScalarField::sample(grid, [&](const Point& x) { return phase_phi(cfg.x0, x); });
  p.psi = ScalarField::sample(grid, [&](const Point& x) { return phase_psi(cfg.x0, cfg.omega, x); });
  p.grad_phi.x = ScalarField::sample(grid, [&](const Point& x) { return grad_phi(cfg.x0, x).x(); });
  p.grad_phi.y = ScalarField::sample(grid, [&](const Point& x) { return grad_phi(cfg.x0, x).y(); });
  p.grad_psi.x = ScalarField::sample(
      grid, [&](const Point& x) { return grad_psi(cfg.x0, cfg.omega, x).x(); });
  p.grad_psi.y = ScalarField::sample(
      grid, [&](const Point& x) { return grad_psi(cfg.x0, cfg.omega, x).y(); });
  return p;
}

double transport_residual(const CGOPhasePair& phases, const ComplexField& a) {
  const Grid& g = *a.grid();
  const VectorField<complexd> ga = gradient(a, g.interior());
  const complexd i(0.0, 1.0);
  double worst = 0.0;
  for (int k : g.interior_nodes()) {
    const complexd vx = phases.grad_psi.x[k] + i * phases.grad_phi.x[k];
    const complexd vy = phases.grad_psi.y[k] + i * phases.grad_phi.y[k];
    // Both phase Laplacians vanish identically (harmonic conjugates).
    worst = std::max(worst, std::abs(2.0 * (vx * ga.x[k] + vy * ga.y[k])));
  }
  return worst;
}

CGOAmplitude build_amplitude(const CGOPhasePair& phases, const ComplexField* a, double tol) {
  CGOAmplitude amp;
  amp.a = a ? *a : ComplexField::constant(phases.phi.grid(), complexd(1.0, 0.0));
  amp.transport_residual = transport_residual(phases, amp.a);
  amp.min_modulus = std::numeric_limits<double>::infinity();
  for (int k : amp.a.grid()->interior_nodes())
    amp.min_modulus = std::min(amp.min_modulus, std::abs(amp.a[k]));
  require(amp.min_modulus > 0.0, ErrorKind::amplitude, "amplitude vanishes");
  require(amp.transport_residual <= tol, ErrorKind::amplitude,
          "amplitude transport residual " + std::to_string(amp.transport_residual) +
              " above tolerance");
  return amp;
}

complexd cgo_value(const CGOConfig& cfg, const Point& x) {
  const double s = sign_value(cfg.sign);
  const double re = s * phase_phi(cfg.x0, x) / cfg.h;
  require(std::fabs(re) <= kOverflowLimit, ErrorKind::h_too_small,
          "exp(s phi / h) leaves the floating-point range, h is too small");
  return std::polar(std::exp(re), phase_psi(cfg.x0, cfg.omega, x) / cfg.h);
}

ComplexField cgo_field(const CGOConfig& cfg, const CGOPhasePair& phases, const CGOAmplitude& amp) {
  const GridPtr& grid = phases.phi.grid();
  const double s = sign_value(cfg.sign);
  auto value = [&](double phi, double psi) {
    const double re = s * phi / cfg.h;
    require(std::fabs(re) <= kOverflowLimit, ErrorKind::h_too_small,
            "exp(s phi / h) leaves the floating-point range, h is too small");
    return std::polar(std::exp(re), psi / cfg.h);
  };
  ComplexField u(grid);
  for (int k : grid->interior_nodes()) u[k] = value(phases.phi[k], phases.psi[k]) * amp.a[k];
  for (int b = 0; b < grid->boundary_size(); ++b)
    u.boundary()[b] = value(phases.phi.boundary()[b], phases.psi.boundary()[b]) * amp.a.boundary()[b];
  return u;
}

double semiclassical_residual(const CGOConfig& cfg, const ComplexField& u, const ScalarField& q) {
  const ComplexField lap = apply_laplacian(u);
  double worst = 0.0;
  const Grid& g = *u.grid();
  for (int k : g.interior_nodes()) {
    const auto& arms = g.arms(k);
    if (std::any_of(arms.begin(), arms.end(), [](const Arm& a) { return a.cut(); })) continue;
    worst = std::max(worst, cfg.h * cfg.h * std::abs(lap[k] + q[k] * u[k]) / std::abs(u[k]));
  }
  return worst;
}

CGOPair CGOPair::growing_decaying(const Point& x0, const Vec2& omega, double h,
                                  double cutoff_width) {
  return {{x0, omega, h, PhaseSign::plus_phi, cutoff_width},
          {x0, omega, h, PhaseSign::minus_phi, cutoff_width}};
}

CGOPair CGOPair::decaying(const Point& x0, const Vec2& omega, double h, double cutoff_width) {
  return {{x0, omega, h, PhaseSign::minus_phi, cutoff_width},
          {x0, omega, 0.5 * h, PhaseSign::minus_phi, cutoff_width}};
}

complexd CGOPair::chi(const Point& x) const {
  const double s1 = sign_value(first.sign);
  const double s2 = sign_value(second.sign);
  const double phi = phase_phi(first.x0, x);
  const double psi = phase_psi(first.x0, first.omega, x);
  return std::polar(std::exp(-(s1 / first.h + s2 / second.h) * phi),
                    -(1.0 / first.h + 1.0 / second.h) * psi);
}

Eigen::Vector2cd CGOPair::grad_log_chi(const Point& x) const {
  const double s1 = sign_value(first.sign);
  const double s2 = sign_value(second.sign);
  const Vec2 gp = grad_phi(first.x0, x);
  const Vec2 gs = grad_psi(first.x0, first.omega, x);
  const double re = -(s1 / first.h + s2 / second.h);
  const double im = -(1.0 / first.h + 1.0 / second.h);
  return Eigen::Vector2cd(complexd(re * gp.x(), im * gs.x()), complexd(re * gp.y(), im * gs.y()));
}

double CGOPair::kappa() const {
  const double a = sign_value(second.sign) / second.h - sign_value(first.sign) / first.h;
  require(a != 0.0, ErrorKind::config, "CGO pair has identical decay rates");
  return -1.0 / a;
}

std::string CGOPair::chi_description() const {
  const double s1 = sign_value(first.sign);
  const double s2 = sign_value(second.sign);
  const double re = -(s1 / first.h + s2 / second.h);
  const double im = -(1.0 / first.h + 1.0 / second.h);
  char buf[160];
  if (re == 0.0)
    std::snprintf(buf, sizeof buf, "exp(%.6g i psi)", im);
  else
    std::snprintf(buf, sizeof buf, "exp(%.6g phi %+.6g i psi)", re, im);
  return buf;
}

double cutoff_profile(double arc_distance, double width) {
  if (arc_distance <= 0.0) return 1.0;
  if (arc_distance >= width) return 0.0;
  const double t = arc_distance / width;
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

Eigen::VectorXd cutoff_weights(const Grid& grid, const BoundarySegmentation& seg, double width) {
  Eigen::VectorXd w(grid.boundary_size());
  for (int b = 0; b < grid.boundary_size(); ++b) {
    const BoundaryPoint& p = grid.boundary()[b];
    w[b] = p.normal ? cutoff_profile(seg.arc_distance_to_front(p.arc) - (seg.gamma_margin() - width), width)
                     : 0.0;
  }
  return w;
}

complexd IlluminationSet::value(int j, const Point& y, const BoundarySegmentation& seg) const {
  const CGOConfig& cfg = cgo[j];
  if (!seg.domain().normal(y)) return 0.0;
  const double s = seg.domain().arc_length(y);
  const double w = cutoff_profile(
      seg.arc_distance_to_front(s) - (seg.gamma_margin() - cfg.cutoff_width), cfg.cutoff_width);
  if (w == 0.0) return 0.0;
  complexd v = cgo_value(cfg, y);
  if (epsilon != 0.0) {
    const double t = 2.0 * std::numbers::pi * s / seg.domain().perimeter();
    v += epsilon * trace_scale[j] * std::polar(1.0, t + 1.3 * j) * (0.75 + 0.25 * std::cos(2.0 * t));
  }
  return w * v;
}

Eigen::VectorXcd IlluminationSet::trace(int j, const Grid& grid,
                                        const BoundarySegmentation& seg) const {
  Eigen::VectorXcd g(grid.boundary_size());
  for (int b = 0; b < grid.boundary_size(); ++b) g[b] = value(j, grid.boundary()[b].x, seg);
  return g;
}

IlluminationSet make_illuminations(const std::vector<CGOConfig>& cfgs, const Grid& grid,
                                   const BoundarySegmentation& seg, double epsilon) {
  require(!cfgs.empty(), ErrorKind::config, "no CGO configuration given");
  require(epsilon >= 0.0, ErrorKind::config, "perturbation bound must be non-negative");
  IlluminationSet set;
  set.cgo = cfgs;
  set.epsilon = epsilon;
  for (const CGOConfig& cfg : cfgs) {
    validate(cfg, seg.domain());
    require((cfg.x0 - seg.x0()).norm() <= 1e-12, ErrorKind::config,
            "CGO pole differs from the segmentation pole");
    require(cfg.cutoff_width < seg.gamma_margin(), ErrorKind::geometry,
            "cutoff band is wider than Gamma minus the front");
    double scale = 0.0;
    for (const auto& n : seg.nodes()) scale = std::max(scale, std::abs(cgo_value(cfg, n.x)));
    set.trace_scale.push_back(scale);
  }
  set.epsilon_hat = 0.0;
  for (size_t j = 0; j < cfgs.size(); ++j) {
    set.g.push_back(set.trace(int(j), grid, seg));
    for (int b = 0; b < grid.boundary_size(); ++b) {
      const complexd u = cgo_value(cfgs[j], grid.boundary()[b].x);
      set.epsilon_hat = std::max(set.epsilon_hat, std::abs(set.g[j][b] - u));
    }
  }
  return set;
}

}  // namespace qpat
