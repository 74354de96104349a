#include <cmath>
#include <numbers>

#include "qpat/inversion.hpp"
#include "support.hpp"

using namespace qpat;
using qpat::test::raised;

namespace {

/// Data d = mu u with illumination trace g = u, for a single real u.
InternalDataSet data_of(const GridPtr& g, const std::function<double(const Point&)>& u, double mu) {
  InternalDataSet data;
  const ComplexField uf = ComplexField::sample(g, [&](const Point& x) { return complexd(u(x)); });
  ComplexField d = uf * complexd(mu);
  d.boundary() = uf.boundary() * mu;
  data.d.push_back(d);
  data.illum.g.push_back(uf.boundary());
  return data;
}

}  // namespace

TEST_SUITE("inversion") {
  TEST_CASE("q of a product of sines") {
    const GridPtr g = Grid::build(DomainSpec::rectangle(0.1, 0.9, 0.1, 0.9), 65, 65);
    const double pi = std::numbers::pi;
    const InternalDataSet data = data_of(g, [&](const Point& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); }, 0.5);
    const ScalarField mu = ScalarField::constant(g, 0.5);
    const ScalarField q = recover_q(mu, data, g->interior());
    for (int k : g->interior_nodes()) CHECK(q[k] == doctest::Approx(2.0 * pi * pi).epsilon(1e-3));
  }

  TEST_CASE("q vanishes for a constant state") {
    const GridPtr g = Grid::build(DomainSpec::unit_disc(), 33, 33);
    const InternalDataSet data = data_of(g, [](const Point&) { return 1.0; }, 0.2);
    const ScalarField q = recover_q(ScalarField::constant(g, 0.2), data, g->interior());
    for (int k : g->interior_nodes()) CHECK(std::abs(q[k]) < 1e-9);
  }

  TEST_CASE("vanishing states are unresolvable") {
    const GridPtr g = Grid::build(DomainSpec::unit_disc(), 33, 33);
    const InternalDataSet data = data_of(g, [](const Point& x) { return x.x(); }, 1.0);
    CHECK(raised([&] { recover_q(ScalarField::constant(g, 1.0), data, g->interior()); }) ==
          ErrorKind::unresolvable_node);
    CHECK(raised([&] { recover_q(ScalarField::constant(g, -1.0), data, g->interior()); }) ==
          ErrorKind::nonpositive_coefficient);
  }

  TEST_CASE("sqrt(D) of the constant medium in both modes") {
    const DomainSpec d = DomainSpec::unit_disc();
    const GridPtr g = Grid::build(d, 33, 33);
    const ScalarField q = ScalarField::constant(g, -0.2);
    const ScalarField mu = ScalarField::constant(g, 0.2);
    Mask region = Mask::Constant(g->size(), false);
    for (int k : g->interior_nodes()) region[k] = d.signed_distance(g->node(k)) < -0.3;
    SqrtDClosure c;
    c.boundary = Eigen::VectorXd::Ones(g->boundary_size());
    c.cut = ScalarField::constant(g, 1.0);
    for (SqrtDMode m : {SqrtDMode::strict, SqrtDMode::exact}) {
      const ScalarField w = recover_sqrtD(q, mu, c, m, region);
      for (int k : g->interior_nodes())
        if (region[k]) CHECK(w[k] == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  TEST_CASE("strict mode without the cut is a configuration error") {
    const DomainSpec d = DomainSpec::unit_disc();
    const GridPtr g = Grid::build(d, 33, 33);
    Mask region = Mask::Constant(g->size(), false);
    for (int k : g->interior_nodes()) region[k] = d.signed_distance(g->node(k)) < -0.3;
    SqrtDClosure c;
    c.boundary = Eigen::VectorXd::Ones(g->boundary_size());
    const auto q = ScalarField::constant(g, -0.2), mu = ScalarField::constant(g, 0.2);
    CHECK(raised([&] { recover_sqrtD(q, mu, c, SqrtDMode::strict, region); }) == ErrorKind::config);
    c.boundary.resize(0);
    CHECK(raised([&] { recover_sqrtD(q, mu, c, SqrtDMode::exact, region); }) == ErrorKind::config);
    CHECK(raised([] { parse_sqrtD_mode("loose"); }) == ErrorKind::config);
    CHECK(parse_sqrtD_mode("exact") == SqrtDMode::exact);
  }

  TEST_CASE("negative sqrt(D) is refused") {
    // lap w = 50 with w = 1 on the circle gives w = 1 + 12.5 (|x|^2 - 1).
    const GridPtr g = Grid::build(DomainSpec::unit_disc(), 33, 33);
    SqrtDClosure c;
    c.boundary = Eigen::VectorXd::Ones(g->boundary_size());
    const ErrorKind k = raised([&] {
      recover_sqrtD(ScalarField::constant(g, 0.0), ScalarField::constant(g, -50.0), c, SqrtDMode::exact,
                    g->interior());
    });
    CHECK(k == ErrorKind::positivity);
    CHECK(exit_code(k) == 6);
  }

  TEST_CASE("report combines mu and sqrt(D) and measures errors") {
    const GridPtr g = Grid::build(DomainSpec::unit_disc(), 33, 33);
    const CoefficientModel m = scenario("constant");
    const GroundTruth t = ground_truth(m, g);
    const InternalDataSet data = data_of(g, [](const Point&) { return 1.0; }, 0.2);
    ScalarField mu = t.mu;
    mu[g->interior_nodes().front()] *= 1.01;
    const ReconstructionReport r = assemble_report(mu, t.q, t.sqrtD, g->interior(), data, &t);
    CHECK(r.mu_error->sup == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(r.sigma_a_error->sup == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(r.sqrtD_error->sup == 0.0);
    CHECK(r.min_sqrtD == doctest::Approx(1.0));
    const ErrorNorms e = error_norms(t.mu, t.mu, g->interior());
    CHECK(e.sup == 0.0);
    CHECK(e.c1 == 0.0);
  }
}
