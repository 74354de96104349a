#include "qpat/pipeline.hpp"

#include <cmath>

#include "qpat/field_io.hpp"

namespace qpat {

CGOPair make_pair(PairKind kind, const Point& x0, const Vec2& omega, double h, double cutoff_width) {
  return kind == PairKind::decaying ? CGOPair::decaying(x0, omega, h, cutoff_width)
                                    : CGOPair::growing_decaying(x0, omega, h, cutoff_width);
}

SourceSetup make_source(const ExperimentConfig& cfg, const Grid& grid, const Point& x0,
                        const CGOPair& pair) {
  BoundarySegmentation seg = segment_boundary(cfg.domain, x0, cfg.resolved_gamma_margin());
  TrustedRegion trusted =
      trusted_region(grid, seg, cfg.resolved_trusted_margin(), cfg.resolved_pole_reach(x0));
  return {x0, pair, std::move(seg), std::move(trusted)};
}

std::vector<SourceSetup> make_sources(const ExperimentConfig& cfg, const Grid& grid, double h) {
  const std::vector<Point> poles =
      cfg.mode == SourceMode::two_source ? std::vector<Point>{cfg.x0} : cfg.poles;
  std::vector<SourceSetup> out;
  for (const Point& p : poles) {
    const CGOPair pair = make_pair(cfg.pair, p, cfg.resolved_omega(p), h, cfg.cutoff_width);
    out.push_back(make_source(cfg, grid, p, pair));
  }
  return out;
}

namespace {

ScalarField with_extrapolated_boundary(ScalarField f) {
  const Grid& g = *f.grid();
  Eigen::VectorXd lattice = f.nodes();
  extend_ghost(g, lattice, 4);
  for (int b = 0; b < g.boundary_size(); ++b) f.boundary()[b] = bicubic(g, lattice, g.boundary()[b].x);
  require(f.has_boundary(), ErrorKind::format, "coefficient file leaves boundary values undefined");
  return f;
}

}  // namespace

Medium load_medium(const ExperimentConfig& cfg, const GridPtr& grid) {
  Medium m;
  if (!cfg.files) {
    m.model = scenario(cfg.scenario);
    m.label = cfg.scenario;
    return m;
  }
  CoefficientPair c;
  c.D = with_extrapolated_boundary(read_scalar_field(cfg.files->D, grid));
  c.sigma_a = with_extrapolated_boundary(read_scalar_field(cfg.files->sigma_a, grid));
  c.G = cfg.files->G ? with_extrapolated_boundary(read_scalar_field(*cfg.files->G, grid))
                     : ScalarField::constant(grid, 1.0);
  m.sampled = std::move(c);
  m.label = "files";
  return m;
}

GroundTruth medium_truth(const Medium& medium, const GridPtr& grid) {
  if (medium.model) return ground_truth(*medium.model, grid);
  const CoefficientPair& c = *medium.sampled;
  const LiouvilleFields lf = liouville_forward(c);
  GroundTruth t;
  t.mu = lf.mu;
  t.q = lf.q;
  t.sqrtD = map(c.D, [](double v) { return std::sqrt(v); });
  t.sigma_a = c.sigma_a;
  return t;
}

Dataset simulate_dataset(const ExperimentConfig& cfg, const Medium& medium, const GridPtr& grid,
                         const std::vector<SourceSetup>& sources, double delta, std::uint64_t seed) {
  Dataset ds;
  ds.grid = grid;
  ds.medium = medium.label;
  const ScalarField G = medium.model ? medium.model->sample(grid).G : medium.sampled->G;
  for (size_t j = 0; j < sources.size(); ++j) {
    const SourceSetup& s = sources[j];
    const IlluminationSet illum = make_illuminations(s.pair, *grid, s.seg, cfg.epsilon);
    InternalDataSet data = medium.model
                               ? simulate_data(*medium.model, illum, s.seg, grid, cfg.simulation)
                               : simulate_data(*medium.sampled, illum, cfg.simulation.solver);
    data = add_noise(data, delta, seed + j, cfg.noise_kind);
    const double achieved = data.achieved_ratio;
    data = remove_grueneisen(data, G);
    data.achieved_ratio = achieved;
    ds.sources.push_back({s.x0, s.pair, std::move(data)});
  }
  GroundTruth truth = medium_truth(medium, grid);
  ds.sqrtD_boundary = truth.sqrtD.boundary();
  ds.sqrtD_cut = truth.sqrtD;
  ds.truth = std::move(truth);
  return ds;
}

Dataset scale_data(const Dataset& ds, double factor) {
  Dataset out = ds;
  for (auto& s : out.sources) {
    for (auto& d : s.data.d) d *= complexd(factor);
    for (auto& g : s.data.illum.g) g *= factor;
  }
  return out;
}

namespace {

InternalDataSet merged_data(const Dataset& ds) {
  InternalDataSet all = ds.sources.front().data;
  for (size_t j = 1; j < ds.sources.size(); ++j) {
    const InternalDataSet& d = ds.sources[j].data;
    all.d.insert(all.d.end(), d.d.begin(), d.d.end());
    all.illum.g.insert(all.illum.g.end(), d.illum.g.begin(), d.illum.g.end());
    all.illum.cgo.insert(all.illum.cgo.end(), d.illum.cgo.begin(), d.illum.cgo.end());
  }
  return all;
}

}  // namespace

Eigen::VectorXd merged_boundary_mu0(const Dataset& ds) {
  Eigen::VectorXd mu0 = boundary_mu0(ds.sources.front().data);
  for (size_t j = 1; j < ds.sources.size(); ++j) {
    const Eigen::VectorXd other = boundary_mu0(ds.sources[j].data);
    for (int b = 0; b < mu0.size(); ++b)
      if (!std::isfinite(mu0[b])) mu0[b] = other[b];
  }
  return mu0;
}

ReconstructionRun reconstruct(const Dataset& ds, const ExperimentConfig& cfg) {
  require(!ds.sources.empty(), ErrorKind::precondition, "dataset has no sources");
  const GridPtr& grid = ds.grid;
  const ScalarField* mu_truth = ds.truth ? &ds.truth->mu : nullptr;
  ReconstructionRun run;

  std::vector<SourceSetup> setups;
  std::vector<TransportField> fields;
  for (const SourceData& s : ds.sources) {
    setups.push_back(make_source(cfg, *grid, s.x0, s.pair));
    fields.push_back(build_transport_field(s.data, s.pair, setups.back().trusted, mu_truth));
    run.flatness.push_back(fields.back().flatness);
    run.min_branch_modulus.push_back(fields.back().min_branch_modulus);
    run.eta.push_back(setups.back().trusted.eta);
  }

  Mask region;
  if (cfg.mode == SourceMode::two_source || ds.sources.size() == 1) {
    run.mu = reconstruct_mu(fields.front(), ds.sources.front().data, setups.front().seg, cfg.trace);
    region = setups.front().trusted.mask;
  } else {
    const GradientSystem system = build_gradient_system(fields, cfg.det_tol);
    run.min_det = system.min_det;
    run.min_normalized_det = system.min_normalized_det;
    run.mu = reconstruct_mu_gradient(system, merged_boundary_mu0(ds), cfg.curl_tol);
    region = system.trusted;
  }

  const InternalDataSet all = merged_data(ds);
  const ScalarField q = recover_q(run.mu.mu, all, region);
  SqrtDClosure closure;
  closure.boundary = ds.sqrtD_boundary;
  closure.cut = ds.sqrtD_cut;
  const ScalarField w = recover_sqrtD(q, run.mu.mu, closure, cfg.sqrtD_mode, region, cfg.simulation.solver);
  run.report = assemble_report(run.mu.mu, q, w, region, all, ds.truth ? &*ds.truth : nullptr);
  return run;
}

}  // namespace qpat
