#include <cmath>

#include "qpat/pipeline.hpp"
#include "support.hpp"

using namespace qpat;
using qpat::test::raised;

namespace {

const Point kPole(2.0, 0.0);

Vec2 radial(const Point& x) { return (kPole - x).normalized(); }

/// Exit point of the straight ray from `x` towards the pole on the unit circle.
Point ray_exit(const Point& x) {
  const Vec2 e = radial(x);
  const double xe = x.dot(e);
  return x + (-xe + std::sqrt(xe * xe - x.squaredNorm() + 1.0)) * e;
}

struct Fixture {
  GridPtr grid;
  BoundarySegmentation seg;
  TrustedRegion trusted;
  CGOPair pair;
  IlluminationSet illum;
};

Fixture fixture(int n) {
  const DomainSpec d = DomainSpec::unit_disc();
  GridPtr g = Grid::build(d, n, n);
  BoundarySegmentation seg = segment_boundary(d, kPole, 0.1 * d.perimeter());
  TrustedRegion tr = trusted_region(*g, seg, 0.3);
  const CGOPair pair = CGOPair::decaying(kPole, default_omega(d, kPole), 0.5, 0.2);
  IlluminationSet il = make_illuminations(pair, *g, seg);
  return {g, std::move(seg), std::move(tr), pair, std::move(il)};
}

/// Data whose boundary values encode mu0 = `mu0` against the illuminations.
InternalDataSet boundary_only_data(const Fixture& f, const std::function<double(const Point&)>& mu0) {
  InternalDataSet data;
  data.illum = f.illum;
  for (const auto& g : f.illum.g) {
    ComplexField d = ComplexField::constant(f.grid, complexd(1.0));
    for (int b = 0; b < f.grid->boundary_size(); ++b) d.boundary()[b] = mu0(f.grid->boundary()[b].x) * g[b];
    data.d.push_back(d);
  }
  return data;
}

}  // namespace

TEST_SUITE("transport") {
  TEST_CASE("radial characteristic exits where the ray meets the front") {
    const Fixture f = fixture(65);
    const TransportField field = synthetic_transport_field(
        f.grid, f.grid->interior(), kPole, radial, [](const Point&) { return 0.3; });
    for (const Point& x : {Point(0.0, 0.0), Point(0.2, 0.3), Point(-0.4, -0.2)}) {
      const FlowTrace tr = trace_characteristic(field, x, f.seg);
      const Point xp = ray_exit(x);
      CHECK(tr.status == TraceStatus::exited_front);
      CHECK((tr.x_plus - xp).norm() < 1e-8);
      CHECK(tr.t_plus == doctest::Approx((xp - x).norm()).epsilon(1e-8));
      CHECK(tr.gamma_integral == doctest::Approx(0.3 * (xp - x).norm()).epsilon(1e-8));
    }
  }

  TEST_CASE("constant gamma reproduces mu0 times exp(gamma t)") {
    const Fixture f = fixture(65);
    auto mu0 = [](const Point& y) { return 1.0 + 0.2 * y.y(); };
    const InternalDataSet data = boundary_only_data(f, mu0);
    const TransportField field = synthetic_transport_field(
        f.grid, f.trusted.mask, kPole, radial, [](const Point&) { return -0.4; });
    const MuResult r = reconstruct_mu(field, data, f.seg);
    CHECK(r.coverage == 1.0);
    double worst = 0.0;
    for (int k : f.grid->interior_nodes()) {
      if (!f.trusted.mask[k]) continue;
      const Point x = f.grid->node(k);
      const Point xp = ray_exit(x);
      const double expect = mu0(xp) * std::exp(-0.4 * (xp - x).norm());
      worst = std::max(worst, std::abs(r.mu[k] - expect) / expect);
    }
    // mu0 is interpolated between boundary points.
    CHECK(worst < 1e-6);
  }

  TEST_CASE("lattice interpolation of the field gives the same exits") {
    const Fixture f = fixture(65);
    const TransportField field = synthetic_transport_field(
        f.grid, f.grid->interior(), kPole, radial, [](const Point&) { return 0.3; }, false);
    const FlowTrace tr = trace_characteristic(field, Point(0.1, 0.1), f.seg);
    CHECK((tr.x_plus - ray_exit(Point(0.1, 0.1))).norm() < 1e-5);
  }

  TEST_CASE("ghost extension is exact for cubics") {
    const GridPtr g = Grid::build(DomainSpec::unit_disc(), 33, 33);
    auto p = [](const Point& x) { return x.x() * x.x() * x.x() - 0.5 * x.x() * x.y() + x.y() + 2.0; };
    Eigen::VectorXd v = Eigen::VectorXd::Constant(g->size(), std::nan(""));
    for (int k : g->interior_nodes()) v[k] = p(g->node(k));
    extend_ghost(*g, v, 3);
    int filled = 0;
    for (int k = 0; k < g->size(); ++k) {
      if (g->is_interior(k) || !std::isfinite(v[k])) continue;
      ++filled;
      CHECK(std::abs(v[k] - p(g->node(k))) < 1e-9);
    }
    CHECK(filled > 0);
  }

  TEST_CASE("field from exact data points at the pole") {
    const Fixture f = fixture(65);
    const InternalDataSet data = simulate_data(scenario("constant"), f.illum, f.seg, f.grid);
    const TransportField field = build_transport_field(data, f.pair, f.trusted);
    CHECK(field.branch == Branch::real_part);
    CHECK(field.min_inward > 0.0);
    CHECK(field.flatness < 0.2);
    CHECK(field.min_branch_modulus > 0.0);
    CHECK(field.min_branch_modulus <= 1.0);
  }

  TEST_CASE("identical data sets give a degenerate field") {
    const Fixture f = fixture(33);
    InternalDataSet data = simulate_data(scenario("constant"), f.illum, f.seg, f.grid);
    data.d[1] = data.d[0];
    data.illum.g[1] = data.illum.g[0];
    const ErrorKind k = raised([&] { build_transport_field(data, f.pair, f.trusted); });
    CHECK(k == ErrorKind::degenerate_field);
    CHECK(exit_code(k) == 4);
  }

  TEST_CASE("a field pointing away from the front leaves nodes uncovered") {
    const Fixture f = fixture(33);
    const InternalDataSet data = boundary_only_data(f, [](const Point&) { return 1.0; });
    const TransportField field = synthetic_transport_field(
        f.grid, f.trusted.mask, kPole, [](const Point&) { return Vec2(-1.0, 0.0); },
        [](const Point&) { return 0.0; });
    try {
      reconstruct_mu(field, data, f.seg);
      FAIL("coverage error expected");
    } catch (const CoverageError& e) {
      CHECK(e.kind() == ErrorKind::partial_coverage);
      CHECK(int(e.nodes().size()) == f.trusted.count);
      CHECK(exit_code(e.kind()) == 5);
    }
  }

  TEST_CASE("trace that never exits hits the time guard") {
    const Fixture f = fixture(33);
    // A sink inside the domain, off the lattice nodes.
    const Point sink(0.05, 0.03);
    const TransportField field = synthetic_transport_field(
        f.grid, f.grid->interior(), kPole, [sink](const Point& x) { return Vec2(sink - x); },
        [](const Point&) { return 0.0; });
    TraceOptions o;
    o.safety = 1.0;
    CHECK(raised([&] { trace_characteristic(field, Point(0.5, 0.0), f.seg, o); }) ==
          ErrorKind::non_exiting_trace);
  }

  TEST_CASE("data scale does not change mu") {
    ExperimentConfig cfg;
    const GridPtr g = Grid::build(cfg.domain, 65, 65);
    const std::vector<SourceSetup> src = make_sources(cfg, *g, 0.5);
    const Dataset ds = simulate_dataset(cfg, load_medium(cfg, g), g, src, 0.0, 1);
    const Dataset big = scale_data(ds, 3.7);
    const TransportField a = build_transport_field(ds.sources[0].data, src[0].pair, src[0].trusted);
    const TransportField b = build_transport_field(big.sources[0].data, src[0].pair, src[0].trusted);
    const MuResult ra = reconstruct_mu(a, ds.sources[0].data, src[0].seg);
    const MuResult rb = reconstruct_mu(b, big.sources[0].data, src[0].seg);
    CHECK(error_norms(rb.mu, ra.mu, src[0].trusted.mask).sup < 1e-6);
  }

  TEST_CASE("gradient system recovers an exponential mu") {
    const DomainSpec d = DomainSpec::unit_disc();
    const GridPtr g = Grid::build(d, 65, 65);
    const Vec2 grad_log(1.0, 0.5);
    auto mu = [&](const Point& x) { return 0.2 * std::exp(grad_log.dot(x)); };
    std::vector<TransportField> fields;
    Mask all = g->interior();
    for (const Point& p : {Point(2.0, 0.6), Point(2.0, -0.6)}) {
      const BoundarySegmentation seg = segment_boundary(d, p, 0.1 * d.perimeter());
      const TrustedRegion tr = trusted_region(*g, seg, 0.3);
      auto b = [p](const Point& x) { return Vec2((p - x).normalized()); };
      fields.push_back(synthetic_transport_field(
          g, tr.mask, p, b, [b, grad_log](const Point& x) { return -b(x).dot(grad_log); }));
    }
    const GradientSystem sys = build_gradient_system(fields);
    CHECK(sys.min_det > 0.0);
    Eigen::VectorXd mu0(g->boundary_size());
    for (int k = 0; k < g->boundary_size(); ++k) mu0[k] = mu(g->boundary()[k].x);
    const MuResult r = reconstruct_mu_gradient(sys, mu0);
    double worst = 0.0;
    for (int k : g->interior_nodes())
      if (sys.trusted[k]) worst = std::max(worst, std::abs(r.mu[k] - mu(g->node(k))) / mu(g->node(k)));
    CHECK(worst < 1e-3);
    CHECK(r.max_curl < 1e-8);
    // Parallel fields have no inverse.
    std::vector<TransportField> same{fields[0], fields[0]};
    CHECK(raised([&] { build_gradient_system(same); }) == ErrorKind::ill_conditioned);
  }
}
