#include <cmath>
#include <fstream>

#include "qpat/dataset_io.hpp"
#include "qpat/field_io.hpp"
#include "qpat/study.hpp"
#include "support.hpp"

using namespace qpat;
using qpat::test::raised;

TEST_SUITE("config_io") {
  TEST_CASE("defaults and a full document") {
    const ExperimentConfig d = parse_config("{}");
    CHECK(d.grid_sizes == std::vector<int>{129});
    CHECK(d.h == std::vector<double>{0.5});
    CHECK(d.resolved_gamma_margin() == doctest::Approx(0.2 * M_PI));
    CHECK(d.resolved_trusted_margin() == doctest::Approx(0.3));
    CHECK(d.resolved_omega(d.x0).isApprox(Vec2(0.0, 1.0)));

    const ExperimentConfig c = parse_config(R"({
      "schema": 1,
      "domain": {"shape": "rectangle", "min": [0, 0], "max": [2, 1]},
      "grid": {"sizes": [33, 65]},
      "cgo": {"x0": [4, 0.5], "h": [0.5, 0.25], "pair": "growing-decaying"},
      "coefficients": {"scenario": "two-inclusion"},
      "noise": {"levels": [0.001], "seeds": [3, 4], "kind": "white"},
      "sources": {"mode": "multi-source", "poles": [[4, 1], [4, 0]]},
      "sqrtD_mode": "exact",
      "study": "refinement",
      "output": "out"
    })",
                                           "/base");
    CHECK(c.domain.shape() == DomainSpec::Shape::rectangle);
    CHECK(c.grid_sizes == std::vector<int>{33, 65});
    CHECK(c.pair == PairKind::growing_decaying);
    CHECK(c.noise_kind == NoiseKind::white);
    CHECK(c.seeds == std::vector<std::uint64_t>{3, 4});
    CHECK(c.mode == SourceMode::multi_source);
    CHECK(c.sqrtD_mode == SqrtDMode::exact);
    CHECK(c.study == StudyKind::refinement);
    CHECK(c.output == std::filesystem::path("/base/out"));
  }

  TEST_CASE("invalid documents are configuration errors") {
    for (const char* text : {R"({"grid": {"sizes": []}})", R"({"bogus": 1})", R"({"cgo": {"h": [1.5]}})",
                             R"({"cgo": {"x0": [0.5, 0]}})", R"({"study": "everything"})",
                             R"({"sources": {"mode": "three-source"}})", R"({"grid": {"sizes": [2]}})",
                             R"({"noise": {"levels": [-1]}})", R"({"coefficients": {"scenario": "nope"}})",
                             "not json"}) {
      CAPTURE(text);
      const ErrorKind k = raised([&] { parse_config(text); });
      CHECK(exit_code(k) == 2);
    }
    CHECK(raised([] { load_config("/nonexistent/qpat.json"); }) == ErrorKind::io);
  }

  TEST_CASE("illumination sets round trip") {
    const auto dir = qpat::test::scratch_dir("illum");
    const DomainSpec d = DomainSpec::unit_disc();
    const GridPtr g = Grid::build(d, 33, 33);
    const BoundarySegmentation seg = segment_boundary(d, Point(2, 0), 0.1 * d.perimeter());
    const IlluminationSet il =
        make_illuminations(CGOPair::decaying(Point(2, 0), Vec2(0, 1), 0.5, 0.2), *g, seg, 0.01);
    write_illumination_set(dir, "s0_illum", *g, il);
    const IlluminationSet back = read_illumination_set(dir / "s0_illum.json", *g);
    REQUIRE(back.g.size() == 2);
    CHECK(back.g[1] == il.g[1]);
    CHECK(back.epsilon == il.epsilon);
    CHECK(back.cgo[1].h == il.cgo[1].h);
    CHECK(back.trace_scale == il.trace_scale);
  }

  TEST_CASE("dataset round trip and reconstruction from disk") {
    const auto dir = qpat::test::scratch_dir("dataset");
    ExperimentConfig cfg;
    const GridPtr g = Grid::build(cfg.domain, 33, 33);
    const Dataset ds = simulate_dataset(cfg, load_medium(cfg, g), g, make_sources(cfg, *g, 0.5), 1e-3, 5);
    write_dataset(dir, ds, cfg, 1e-3, 5);
    ExperimentConfig cfg2;
    cfg2.x0 = Point(5, 5);
    const Dataset back = read_dataset(dir, cfg2);
    CHECK(cfg2.x0.isApprox(Point(2, 0)));
    REQUIRE(back.sources.size() == 1);
    CHECK(back.sources[0].data.achieved_ratio == ds.sources[0].data.achieved_ratio);
    for (int k : g->interior_nodes()) CHECK(back.sources[0].data.d[1][k] == ds.sources[0].data.d[1][k]);
    CHECK(back.sqrtD_boundary == ds.sqrtD_boundary);
    REQUIRE(back.truth.has_value());
    const ReconstructionRun a = reconstruct(ds, cfg);
    const ReconstructionRun b = reconstruct(back, cfg2);
    CHECK(error_norms(b.report.q, a.report.q, a.report.region).sup == 0.0);

    const auto out = dir / "report";
    write_report(out, b);
    CHECK(std::filesystem::exists(out / "metrics.json"));
    const FieldHeader h = read_header(out / "sigma_a.qpf");
    CHECK(h.nx == 33);
    std::ifstream in(out / "metrics.json");
    const nlohmann::json m = nlohmann::json::parse(in);
    CHECK(m.contains("liouville_residual"));

    std::filesystem::remove(dir / "manifest.json");
    CHECK(raised([&] { read_dataset(dir, cfg2); }) == ErrorKind::io);
  }

  TEST_CASE("least-squares fits") {
    const LinearFit f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.slope_stderr == doctest::Approx(0.0).epsilon(1e-12));
    const LinearFit l = fit_loglog({1e-4, 1e-3, 1e-2}, {3e-8, 3e-6, 3e-4});
    CHECK(l.slope == doctest::Approx(2.0));
    // y = x + noise: slope 1.0 +- stderr with the t interval.
    const LinearFit n = fit_line({0, 1, 2, 3, 4}, {0.1, 0.9, 2.1, 2.9, 4.1});
    CHECK(n.lo < 1.0);
    CHECK(n.hi > 1.0);
    CHECK((n.hi - n.slope) == doctest::Approx(t_quantile_975(3) * n.slope_stderr));
    CHECK(t_quantile_975(1) == doctest::Approx(12.706).epsilon(1e-4));
    CHECK(t_quantile_975(10) == doctest::Approx(2.228).epsilon(1e-3));
    CHECK(t_quantile_975(1000) == doctest::Approx(1.96).epsilon(2e-3));
    CHECK(raised([] { fit_line({1}, {1}); }) == ErrorKind::config);
    CHECK(raised([] { fit_loglog({1, 2}, {1, -1}); }) == ErrorKind::config);
  }

  TEST_CASE("studies need three points and are deterministic") {
    ExperimentConfig cfg;
    cfg.grid_sizes = {33, 65};
    CHECK(raised([&] { run_study(cfg, StudyKind::refinement); }) == ErrorKind::config);
    cfg.grid_sizes = {65};
    cfg.noise_levels = {1e-3, 1e-2};
    CHECK(raised([&] { run_study(cfg, StudyKind::exit_stability); }) == ErrorKind::config);
    cfg.noise_levels = {1e-3, 3e-3, 1e-2};
    const StudyResult a = run_study(cfg, StudyKind::exit_stability);
    const StudyResult b = run_study(cfg, StudyKind::exit_stability);
    CHECK(a.table.csv() == b.table.csv());
    CHECK(a.table.rows.size() == 3);
    CHECK(a.summary.contains("fits"));
    const auto dir = qpat::test::scratch_dir("study");
    write_study(dir, a);
    CHECK(std::filesystem::exists(dir / "exit_stability.csv"));
    CHECK(std::filesystem::exists(dir / "exit_stability_summary.json"));
  }
}
