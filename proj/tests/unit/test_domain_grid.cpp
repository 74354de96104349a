#include <numbers>

#include "qpat/boundary.hpp"
#include "qpat/field_io.hpp"
#include "support.hpp"

using namespace qpat;
using qpat::test::raised;

TEST_SUITE("domain_grid") {
  TEST_CASE("disc geometry") {
    const DomainSpec d = DomainSpec::unit_disc();
    CHECK(d.perimeter() == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-9));
    CHECK(d.area() == doctest::Approx(std::numbers::pi).epsilon(1e-9));
    CHECK(d.signed_distance(Point(0.5, 0.0)) == doctest::Approx(-0.5));
    CHECK(d.diameter() == doctest::Approx(2.0));
    for (double s : {0.0, 0.7, 2.5, 6.0}) {
      const Point p = d.point_at_arc(s);
      CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(d.arc_length(p) == doctest::Approx(s).epsilon(1e-9));
      CHECK(d.normal(p)->dot(p) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  TEST_CASE("rectangle corners have no normal") {
    const DomainSpec r = DomainSpec::rectangle(0.0, 2.0, 0.0, 1.0);
    CHECK_FALSE(r.normal(Point(2.0, 1.0)).has_value());
    CHECK(r.normal(Point(1.0, 0.0))->isApprox(Vec2(0.0, -1.0)));
    CHECK(r.perimeter() == doctest::Approx(6.0).epsilon(1e-9));
    CHECK(r.support(Vec2(1.0, 0.0)) == doctest::Approx(2.0));
  }

  TEST_CASE("superellipse lies between the inscribed disc and the box") {
    const DomainSpec s = DomainSpec::superellipse(Point::Zero(), Vec2(1.0, 1.0), 4.0);
    CHECK(s.contains(Point(0.8, 0.8)));
    CHECK_FALSE(DomainSpec::unit_disc().contains(Point(0.8, 0.8)));
    CHECK_FALSE(s.contains(Point(0.99, 0.99)));
  }

  TEST_CASE("grid nodes, arms and boundary points") {
    const GridPtr g = Grid::build(DomainSpec::unit_disc(), 65, 65);
    CHECK(g->dx() == doctest::Approx(2.0 / 64));
    for (int k : g->interior_nodes()) {
      CHECK(g->domain().contains(g->node(k)));
      for (const Arm& a : g->arms(k)) {
        CHECK(a.theta > 0.0);
        CHECK(a.theta <= 1.0);
      }
    }
    for (const BoundaryPoint& b : g->boundary()) CHECK(std::abs(b.x.norm() - 1.0) < 1e-12);
    // Interior node count approximates the area.
    CHECK(double(g->interior_nodes().size()) * g->dx() * g->dy() ==
          doctest::Approx(std::numbers::pi).epsilon(0.02));
  }

  TEST_CASE("grid size below three is refused") {
    CHECK(raised([] { Grid::build(DomainSpec::unit_disc(), 2, 9); }) == ErrorKind::config);
  }

  TEST_CASE("QPF1 round trip and header mismatch") {
    const auto dir = qpat::test::scratch_dir("qpf");
    const GridPtr g = Grid::build(DomainSpec::unit_disc(), 17, 17);
    const ScalarField one = ScalarField::constant(g, 1.0);
    write_field(dir / "one.qpf", one);
    const ScalarField back = read_scalar_field(dir / "one.qpf", g);
    for (int k = 0; k < g->size(); ++k) {
      if (g->is_interior(k))
        CHECK(back[k] == 1.0);
      else
        CHECK(std::isnan(back[k]));
    }
    const FieldHeader h = read_header(dir / "one.qpf");
    CHECK(h.nx == 17);
    CHECK_FALSE(h.complex);

    const ComplexField z = ComplexField::sample(g, [](const Point& x) { return complexd(x.x(), -x.y()); });
    write_field(dir / "z.qpf", z);
    const ComplexField zb = read_complex_field(dir / "z.qpf", g);
    for (int k : g->interior_nodes()) CHECK(zb[k] == z[k]);

    const GridPtr other = Grid::build(DomainSpec::unit_disc(), 19, 17);
    CHECK(raised([&] { read_scalar_field(dir / "one.qpf", other); }) == ErrorKind::format);
    CHECK(raised([&] { read_complex_field(dir / "one.qpf", g); }) == ErrorKind::format);
    CHECK(raised([&] { read_header(dir / "missing.qpf"); }) == ErrorKind::io);
  }

  TEST_CASE("front of the disc seen from (2, 0)") {
    const DomainSpec d = DomainSpec::unit_disc();
    const double margin = 0.1 * d.perimeter();
    const BoundarySegmentation seg = segment_boundary(d, Point(2.0, 0.0), margin);
    // (x0 - x).n > 0 on the disc iff cos(theta) > 1/2.
    CHECK(seg.front_length() == doctest::Approx(2.0 * std::numbers::pi / 3.0).epsilon(5e-3));
    CHECK(seg.gamma_length() == doctest::Approx(seg.front_length() + 2.0 * margin).epsilon(5e-3));
    CHECK(seg.in_front(Point(1.0, 0.0)));
    CHECK_FALSE(seg.in_front(Point(-1.0, 0.0)));
    CHECK(seg.distance_to_back(Point(-0.5, 0.0)) == doctest::Approx(0.5).epsilon(1e-2));
  }

  TEST_CASE("pole inside the hull is refused") {
    CHECK_FALSE(outside_hull(DomainSpec::unit_disc(), Point(0.5, 0.0)));
    CHECK(raised([] { segment_boundary(DomainSpec::unit_disc(), Point(0.5, 0.0), 0.5); }) ==
          ErrorKind::pole_placement);
  }

  TEST_CASE("trusted region keeps its distance from the back side") {
    const DomainSpec d = DomainSpec::unit_disc();
    const GridPtr g = Grid::build(d, 65, 65);
    const BoundarySegmentation seg = segment_boundary(d, Point(2.0, 0.0), 0.1 * d.perimeter());
    const TrustedRegion t = trusted_region(*g, seg, 0.3);
    CHECK(t.count > 0);
    CHECK(t.eta > 0.0);
    for (int k : g->interior_nodes())
      if (t.mask[k]) CHECK(seg.distance_to_back(g->node(k)) >= 0.3 - 1e-12);
  }

  TEST_CASE("dilation and bicubic interpolation") {
    const GridPtr g = Grid::build(DomainSpec::rectangle(0.0, 1.0, 0.0, 1.0), 11, 11);
    Mask m = Mask::Constant(g->size(), false);
    m[g->index(5, 5)] = true;
    CHECK(count(dilate(*g, m, 1)) == 5);
    CHECK(count(dilate(*g, m, 2)) == 13);
    Eigen::VectorXd cubic(g->size());
    auto p = [](const Point& x) { return x.x() * x.x() * x.x() - 2.0 * x.x() * x.y() + x.y() * x.y(); };
    for (int k = 0; k < g->size(); ++k) cubic[k] = p(g->node(k));
    const Point x(0.437, 0.612);
    CHECK(bicubic(*g, cubic, x) == doctest::Approx(p(x)).epsilon(1e-12));
  }
}
