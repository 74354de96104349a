#include "qpat/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "qpat/dataset_io.hpp"
#include "qpat/parallel.hpp"

namespace qpat {

using nlohmann::json;

double t_quantile_975(int dof) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                 2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                 2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  require(dof >= 1, ErrorKind::config, "t quantile needs at least one degree of freedom");
  if (dof <= 30) return table[dof - 1];
  if (dof <= 60) return 2.042 + (2.000 - 2.042) * (dof - 30) / 30.0;
  if (dof <= 120) return 2.000 + (1.980 - 2.000) * (dof - 60) / 60.0;
  return 1.960;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::config, "a fit needs at least two points");
  const int n = int(x.size());
  const Eigen::Map<const Eigen::VectorXd> X(x.data(), n), Y(y.data(), n);
  const double mx = X.mean(), my = Y.mean();
  const double sxx = (X.array() - mx).square().sum();
  require(sxx > 0.0, ErrorKind::config, "a fit needs distinct abscissae");
  LinearFit f;
  f.points = n;
  f.slope = ((X.array() - mx) * (Y.array() - my)).sum() / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    const double sse = (Y.array() - f.intercept - f.slope * X.array()).square().sum();
    f.slope_stderr = std::sqrt(sse / (n - 2) / sxx);
    const double t = t_quantile_975(n - 2);
    f.lo = f.slope - t * f.slope_stderr;
    f.hi = f.slope + t * f.slope_stderr;
  } else {
    f.lo = f.hi = f.slope;
  }
  return f;
}

LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, ErrorKind::config, "log-log fit needs positive values");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

std::vector<double> StudyTable::column(const std::string& name) const {
  for (size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) {
      std::vector<double> out;
      for (const auto& r : rows) out.push_back(r[c]);
      return out;
    }
  throw Error(ErrorKind::precondition, "no column '" + name + "'");
}

std::string StudyTable::csv() const {
  std::string out;
  for (size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += "\n";
  char buf[64];
  for (const auto& r : rows) {
    for (size_t c = 0; c < r.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.12g", r[c]);
      out += (c ? "," : "") + std::string(buf);
    }
    out += "\n";
  }
  return out;
}

namespace {

json fit_json(const LinearFit& f) {
  return {{"slope", f.slope},
          {"intercept", f.intercept},
          {"slope_stderr", f.slope_stderr},
          {"ci95", json::array({f.lo, f.hi})},
          {"points", f.points}};
}

void require_points(size_t n, const std::string& what) {
  require(n >= 3, ErrorKind::config, what + " sweep needs at least 3 points");
}

Vec2 perturbation(const Point& x) { return Vec2(std::sin(2.0 * x.y() + 1.0), std::cos(3.0 * x.x() - 0.5)); }

StudyTable refinement(const ExperimentConfig& cfg) {
  require_points(cfg.grid_sizes.size(), "refinement");
  StudyTable t{{"n", "dx", "mu_error", "q_error", "sqrtD_error", "sigma_a_error", "liouville_residual"}, {}};
  t.rows.resize(cfg.grid_sizes.size());
  parallel_for(int(cfg.grid_sizes.size()), [&](int i) {
    const int n = cfg.grid_sizes[i];
    const GridPtr grid = Grid::build(cfg.domain, n, n);
    const Dataset ds = simulate_dataset(cfg, load_medium(cfg, grid), grid,
                                        make_sources(cfg, *grid, cfg.h.front()), 0.0, cfg.seeds.front());
    const ReconstructionRun run = reconstruct(ds, cfg);
    const ReconstructionReport& r = run.report;
    t.rows[i] = {double(n), grid->dx(), r.mu_error->sup, r.q_error->sup, r.sqrtD_error->sup,
                 r.sigma_a_error->sup, r.liouville_residual};
  });
  return t;
}

StudyTable h_sweep(const ExperimentConfig& cfg) {
  require_points(cfg.h.size(), "h");
  StudyTable t{{"h", "flatness", "flatness_truth", "mu_error"}, {}};
  t.rows.resize(cfg.h.size());
  const int n = cfg.grid_sizes.front();
  const GridPtr grid = Grid::build(cfg.domain, n, n);
  const Medium medium = load_medium(cfg, grid);
  parallel_for(int(cfg.h.size()), [&](int i) {
    const double h = cfg.h[i];
    const std::vector<SourceSetup> sources = make_sources(cfg, *grid, h);
    const Dataset ds = simulate_dataset(cfg, medium, grid, {sources.front()}, 0.0, cfg.seeds.front());
    const TransportField f = build_transport_field(ds.sources.front().data, sources.front().pair,
                                                   sources.front().trusted, &ds.truth->mu);
    const MuResult mu = reconstruct_mu(f, ds.sources.front().data, sources.front().seg, cfg.trace);
    t.rows[i] = {h, f.flatness, f.flatness_truth,
                 error_norms(mu.mu, ds.truth->mu, sources.front().trusted.mask).sup};
  });
  return t;
}

std::vector<double> positive_levels(const ExperimentConfig& cfg) {
  std::vector<double> out;
  for (double d : cfg.noise_levels)
    if (d > 0.0) out.push_back(d);
  return out;
}

StudyTable stability(const ExperimentConfig& cfg) {
  const std::vector<double> levels = positive_levels(cfg);
  require_points(levels.size(), "stability");
  StudyTable t{{"delta", "seed", "achieved_ratio", "mu_difference", "q_difference", "total"}, {}};
  const int n = cfg.grid_sizes.front();
  const GridPtr grid = Grid::build(cfg.domain, n, n);
  const Medium medium = load_medium(cfg, grid);
  const std::vector<SourceSetup> sources = make_sources(cfg, *grid, cfg.h.front());
  const ReconstructionRun clean =
      reconstruct(simulate_dataset(cfg, medium, grid, sources, 0.0, cfg.seeds.front()), cfg);
  const Mask& region = clean.report.region;
  const int rows = int(levels.size() * cfg.seeds.size());
  t.rows.resize(rows);
  parallel_for(rows, [&](int i) {
    const double delta = levels[i / cfg.seeds.size()];
    const std::uint64_t seed = cfg.seeds[i % cfg.seeds.size()];
    const Dataset ds = simulate_dataset(cfg, medium, grid, sources, delta, seed);
    const ReconstructionRun run = reconstruct(ds, cfg);
    const double dmu = error_norms(run.report.mu, clean.report.mu, region).abs_sup;
    const double dq = error_norms(run.report.q, clean.report.q, region).abs_sup;
    double achieved = 0.0;
    for (const auto& s : ds.sources) achieved = std::max(achieved, s.data.achieved_ratio);
    t.rows[i] = {delta, double(seed), achieved, dmu, dq, dmu + dq};
  });
  return t;
}

StudyTable exit_stability(const ExperimentConfig& cfg) {
  const std::vector<double> levels = positive_levels(cfg);
  require_points(levels.size(), "exit stability");
  StudyTable t{{"eps", "field_distance", "exit_distance", "starts"}, {}};
  const int n = cfg.grid_sizes.front();
  const GridPtr grid = Grid::build(cfg.domain, n, n);
  const SourceSetup s = make_sources(cfg, *grid, cfg.h.front()).front();
  t.rows.resize(levels.size());
  parallel_for(int(levels.size()), [&](int i) {
    const ExitPerturbation p = exit_map_perturbation(grid, s.seg, s.trusted.mask, levels[i], cfg.trace);
    t.rows[i] = {levels[i], p.field_distance, p.exit_distance, double(p.starts)};
  });
  return t;
}

StudyTable multisource(const ExperimentConfig& cfg) {
  require_points(cfg.grid_sizes.size(), "multisource");
  ExperimentConfig multi = cfg;
  multi.mode = SourceMode::multi_source;
  require(multi.poles.size() >= 2, ErrorKind::config, "multisource study needs at least two poles");
  std::vector<std::string> cols{"n", "dx", "multi_error"};
  for (size_t j = 0; j < multi.poles.size(); ++j) cols.push_back("single_error_" + std::to_string(j));
  for (std::string c : {"min_det", "min_normalized_det", "max_curl", "region_nodes"}) cols.push_back(c);
  StudyTable t{cols, {}};
  t.rows.resize(cfg.grid_sizes.size());
  parallel_for(int(cfg.grid_sizes.size()), [&](int i) {
    const int n = cfg.grid_sizes[i];
    const GridPtr grid = Grid::build(multi.domain, n, n);
    const Dataset ds = simulate_dataset(multi, load_medium(multi, grid), grid,
                                        make_sources(multi, *grid, multi.h.front()), 0.0, multi.seeds.front());
    const MultiSourceComparison c = compare_multisource(ds, multi);
    std::vector<double> row{double(n), grid->dx(), c.multi_error};
    row.insert(row.end(), c.single_error.begin(), c.single_error.end());
    row.insert(row.end(), {c.min_det, c.min_normalized_det, c.max_curl, double(c.region_nodes)});
    t.rows[i] = row;
  });
  return t;
}

}  // namespace

StudyResult run_study(const ExperimentConfig& cfg, StudyKind kind) {
  const auto start = std::chrono::steady_clock::now();
  StudyResult r;
  r.kind = kind;
  json fits;
  switch (kind) {
    case StudyKind::refinement:
      r.table = refinement(cfg);
      for (std::string c : {"mu_error", "q_error", "sqrtD_error", "sigma_a_error"})
        fits[c + "_order"] = fit_json(fit_loglog(r.table.column("dx"), r.table.column(c)));
      break;
    case StudyKind::h_sweep:
      r.table = h_sweep(cfg);
      fits["flatness_vs_h"] = fit_json(fit_loglog(r.table.column("h"), r.table.column("flatness")));
      fits["flatness_truth_vs_h"] =
          fit_json(fit_loglog(r.table.column("h"), r.table.column("flatness_truth")));
      break;
    case StudyKind::stability:
      r.table = stability(cfg);
      fits["total_vs_delta"] = fit_json(fit_loglog(r.table.column("delta"), r.table.column("total")));
      break;
    case StudyKind::exit_stability:
      r.table = exit_stability(cfg);
      fits["exit_vs_field"] =
          fit_json(fit_loglog(r.table.column("field_distance"), r.table.column("exit_distance")));
      break;
    case StudyKind::multisource:
      r.table = multisource(cfg);
      fits["multi_error_order"] = fit_json(fit_loglog(r.table.column("dx"), r.table.column("multi_error")));
      break;
  }
  r.summary["study"] = to_string(kind);
  r.summary["rows"] = r.table.rows.size();
  r.summary["fits"] = fits;
  r.summary["medium"] = cfg.files ? "files" : cfg.scenario;
  r.summary["elapsed_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void write_study(const std::filesystem::path& dir, const StudyResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorKind::io, "cannot create " + dir.string());
  const std::string stem(to_string(result.kind));
  write_text(dir / (stem + ".csv"), result.table.csv());
  write_text(dir / (stem + "_summary.json"), result.summary.dump(2) + "\n");
}

ExitPerturbation exit_map_perturbation(const GridPtr& grid, const BoundarySegmentation& seg,
                                       const Mask& starts, double eps, const TraceOptions& opts) {
  const Point x0 = seg.x0();
  auto radial = [x0](const Point& x) -> Vec2 { return (x0 - x) / (x0 - x).squaredNorm(); };
  auto gamma = [](const Point&) { return 0.3; };
  const Mask all = grid->interior();
  const TransportField base = synthetic_transport_field(grid, all, x0, radial, gamma);
  const TransportField pert = synthetic_transport_field(
      grid, all, x0, [&](const Point& x) -> Vec2 { return radial(x) + eps * perturbation(x); }, gamma);
  ExitPerturbation out;
  for (int k : grid->interior_nodes()) out.field_distance = std::max(out.field_distance, eps * perturbation(grid->node(k)).norm());
  for (int b = 0; b < grid->boundary_size(); ++b)
    out.field_distance = std::max(out.field_distance, eps * perturbation(grid->boundary()[b].x).norm());
  std::vector<int> nodes;
  for (int k : grid->interior_nodes())
    if (starts[k]) nodes.push_back(k);
  std::vector<double> dist(nodes.size());
  parallel_for(int(nodes.size()), [&](int i) {
    const Point x = grid->node(nodes[i]);
    const FlowTrace a = trace_characteristic(base, x, seg, opts);
    const FlowTrace c = trace_characteristic(pert, x, seg, opts);
    dist[i] = (a.x_plus - c.x_plus).norm() + std::abs(a.t_plus - c.t_plus);
  });
  for (double d : dist) out.exit_distance = std::max(out.exit_distance, d);
  out.starts = int(nodes.size());
  return out;
}

MultiSourceComparison compare_multisource(const Dataset& ds, const ExperimentConfig& cfg) {
  require(ds.truth.has_value(), ErrorKind::precondition, "comparison needs the ground truth");
  require(ds.sources.size() >= 2, ErrorKind::precondition, "comparison needs at least two sources");
  const GroundTruth& truth = *ds.truth;
  std::vector<SourceSetup> setups;
  std::vector<TransportField> fields;
  for (const SourceData& s : ds.sources) {
    setups.push_back(make_source(cfg, *ds.grid, s.x0, s.pair));
    fields.push_back(build_transport_field(s.data, s.pair, setups.back().trusted));
  }
  const GradientSystem system = build_gradient_system(fields, cfg.det_tol);
  const MuResult multi = reconstruct_mu_gradient(system, merged_boundary_mu0(ds), cfg.curl_tol);
  MultiSourceComparison c;
  c.multi_error = error_norms(multi.mu, truth.mu, system.trusted).sup;
  c.min_det = system.min_det;
  c.min_normalized_det = system.min_normalized_det;
  c.max_curl = multi.max_curl;
  c.region_nodes = count(system.trusted);
  for (size_t j = 0; j < ds.sources.size(); ++j) {
    const MuResult single = reconstruct_mu(fields[j], ds.sources[j].data, setups[j].seg, cfg.trace);
    c.single_error.push_back(error_norms(single.mu, truth.mu, system.trusted).sup);
    c.single_vs_multi.push_back(error_norms(single.mu, multi.mu, system.trusted).abs_sup /
                                max_abs(truth.mu, system.trusted));
  }
  return c;
}

}  // namespace qpat
