#include <cmath>

#include "qpat/forward.hpp"
#include "support.hpp"

using namespace qpat;
using qpat::test::raised;

namespace {

struct Setup {
  GridPtr grid;
  BoundarySegmentation seg;
  IlluminationSet illum;
};

Setup setup(int n, double h = 0.5) {
  const DomainSpec d = DomainSpec::unit_disc();
  const Point x0(2.0, 0.0);
  GridPtr g = Grid::build(d, n, n);
  BoundarySegmentation seg = segment_boundary(d, x0, 0.1 * d.perimeter());
  IlluminationSet il = make_illuminations(CGOPair::decaying(x0, default_omega(d, x0), h, 0.2), *g, seg);
  return {g, std::move(seg), std::move(il)};
}

}  // namespace

TEST_SUITE("forward") {
  TEST_CASE("Liouville fields of the constant medium") {
    const GridPtr g = Grid::build(DomainSpec::unit_disc(), 33, 33);
    const CoefficientModel m = scenario("constant");
    const LiouvilleFields lf = liouville_forward(m.sample(g));
    for (int k : g->interior_nodes()) {
      CHECK(lf.q[k] == doctest::Approx(-0.2).epsilon(1e-12));
      CHECK(lf.mu[k] == doctest::Approx(0.2).epsilon(1e-12));
    }
    CHECK(m.q(Point(0.1, 0.1)) == doctest::Approx(-0.2));
  }

  TEST_CASE("analytic q matches the discrete Liouville transform") {
    const CoefficientModel m = scenario("gaussian-bump");
    double prev = 0.0;
    for (int n : {33, 65, 129}) {
      const GridPtr g = Grid::build(DomainSpec::unit_disc(), n, n);
      const LiouvilleFields lf = liouville_forward(m.sample(g));
      // Cut stencils next to the boundary are first order; measure inside.
      double e = 0.0;
      for (int k : g->interior_nodes())
        if (g->domain().signed_distance(g->node(k)) < -0.1) e = std::max(e, std::abs(lf.q[k] - m.q(g->node(k))));
      if (prev > 0.0) CHECK(qpat::test::order(prev, e) > 1.8);
      prev = e;
    }
  }

  TEST_CASE("Gaussian sums have consistent derivatives") {
    const GaussianSum s{1.0, {{0.3, 5.0, Point(0.4, 0.0)}}};
    const Point x(0.1, 0.25);
    const double e = 1e-4;
    const double lap = (s.value(x + Vec2(e, 0)) + s.value(x - Vec2(e, 0)) + s.value(x + Vec2(0, e)) +
                        s.value(x - Vec2(0, e)) - 4.0 * s.value(x)) / (e * e);
    CHECK(s.laplacian(x) == doctest::Approx(lap).epsilon(1e-6));
    CHECK(s.grad(x).x() == doctest::Approx((s.value(x + Vec2(e, 0)) - s.value(x - Vec2(e, 0))) / (2 * e)).epsilon(1e-7));
  }

  TEST_CASE("data solve the diffusion equation with the Schroedinger-side traces") {
    const Setup s = setup(33);
    const CoefficientPair c = scenario("gaussian-bump").sample(s.grid);
    const InternalDataSet data = simulate_data(c, s.illum);
    REQUIRE(data.d.size() == 2);
    for (int j = 0; j < 2; ++j)
      for (int b = 0; b < s.grid->boundary_size(); ++b)
        CHECK(std::abs(data.d[j].boundary()[b] -
                       c.sigma_a.boundary()[b] * s.illum.g[j][b] / std::sqrt(c.D.boundary()[b])) < 1e-12);
  }

  TEST_CASE("refined simulation approaches the same data") {
    const Setup s = setup(33);
    const CoefficientModel m = scenario("gaussian-bump");
    SimulationOptions one;
    one.refine = 1;
    SimulationOptions four;
    const InternalDataSet a = simulate_data(m, s.illum, s.seg, s.grid, one);
    const InternalDataSet b = simulate_data(m, s.illum, s.seg, s.grid, four);
    double diff = 0.0, scale = 0.0;
    for (int k : s.grid->interior_nodes()) {
      diff = std::max(diff, std::abs(a.d[0][k] - b.d[0][k]));
      scale = std::max(scale, std::abs(b.d[0][k]));
    }
    CHECK(diff / scale < 5e-3);
    SimulationOptions bad;
    bad.refine = 0;
    CHECK(raised([&] { simulate_data(m, s.illum, s.seg, s.grid, bad); }) == ErrorKind::config);
  }

  TEST_CASE("noise is deterministic and hits the requested level") {
    const Setup s = setup(33);
    const InternalDataSet clean = simulate_data(scenario("constant").sample(s.grid), s.illum);
    const InternalDataSet a = add_noise(clean, 1e-2, 7);
    const InternalDataSet b = add_noise(clean, 1e-2, 7);
    const InternalDataSet c = add_noise(clean, 1e-2, 8);
    double same = 0.0, other = 0.0;
    for (int k : s.grid->interior_nodes()) {
      same = std::max(same, std::abs(a.d[0][k] - b.d[0][k]));
      other = std::max(other, std::abs(a.d[0][k] - c.d[0][k]));
    }
    CHECK(same == 0.0);
    CHECK(other > 0.0);
    CHECK(a.achieved_ratio <= 1e-2 * (1.0 + 1e-12));
    CHECK(a.achieved_ratio > 1e-3);
    const InternalDataSet w = add_noise(clean, 1e-2, 7, NoiseKind::white);
    CHECK(w.achieved_ratio == doctest::Approx(1e-2).epsilon(0.05));
    const InternalDataSet z = add_noise(clean, 0.0, 7);
    CHECK(z.achieved_ratio == 0.0);
    CHECK(raised([&] { add_noise(clean, -1.0, 7); }) == ErrorKind::config);
    for (std::uint64_t r : {std::uint64_t(0), ~std::uint64_t(0), std::uint64_t(1) << 63}) {
      CHECK(uniform_pm1(r) >= -1.0);
      CHECK(uniform_pm1(r) <= 1.0);
    }
  }

  TEST_CASE("Grueneisen factor divides out") {
    const Setup s = setup(17);
    const InternalDataSet clean = simulate_data(scenario("constant").sample(s.grid), s.illum);
    InternalDataSet scaled = clean;
    const ScalarField G = ScalarField::sample(s.grid, [](const Point& x) { return 1.5 + 0.2 * x.x(); });
    for (auto& d : scaled.d) d = d * to_complex(G);
    const InternalDataSet back = remove_grueneisen(scaled, G);
    for (int k : s.grid->interior_nodes()) CHECK(std::abs(back.d[1][k] - clean.d[1][k]) < 1e-14);
  }

  TEST_CASE("unknown scenario and nonpositive coefficients") {
    CHECK(raised([] { scenario("nope"); }) == ErrorKind::config);
    const GridPtr g = Grid::build(DomainSpec::unit_disc(), 17, 17);
    CoefficientPair c = scenario("constant").sample(g);
    c.D.boundary()[0] = -1.0;
    CHECK(raised([&] { liouville_forward(c); }) == ErrorKind::nonpositive_coefficient);
  }
}
