#include "qpat/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "qpat/field_io.hpp"

namespace qpat {

namespace fs = std::filesystem;
using nlohmann::json;
using detail::json_point;
using detail::to_json;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(bool(out), ErrorKind::io, "cannot write " + path.string());
  out << text;
  out.close();
  require(bool(out), ErrorKind::io, "write failed for " + path.string());
}

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  require(bool(in), ErrorKind::io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, path.string() + ": " + e.what());
  }
}

void require_file(const fs::path& path) {
  require(fs::exists(path), ErrorKind::io, "missing file " + path.string());
}

json cgo_to_json(const CGOConfig& c) {
  return {{"x0", to_json(c.x0)},
          {"omega", to_json(c.omega)},
          {"h", c.h},
          {"sign", c.sign == PhaseSign::plus_phi ? "+phi" : "-phi"},
          {"cutoff_width", c.cutoff_width}};
}

CGOConfig cgo_from_json(const json& j) {
  CGOConfig c;
  c.x0 = json_point(j.at("x0"), "x0");
  c.omega = json_point(j.at("omega"), "omega");
  c.h = j.at("h").get<double>();
  const std::string sign = j.at("sign").get<std::string>();
  require(sign == "+phi" || sign == "-phi", ErrorKind::format, "bad CGO sign '" + sign + "'");
  c.sign = sign == "+phi" ? PhaseSign::plus_phi : PhaseSign::minus_phi;
  c.cutoff_width = j.at("cutoff_width").get<double>();
  return c;
}

void write_with_boundary(const fs::path& dir, const std::string& stem, const ScalarField& f) {
  write_field(dir / (stem + ".qpf"), f);
  write_boundary_trace(dir / (stem + "_boundary.qpf"), *f.grid(), f.boundary());
}

ScalarField read_with_boundary(const fs::path& dir, const std::string& stem, const GridPtr& grid) {
  require_file(dir / (stem + ".qpf"));
  require_file(dir / (stem + "_boundary.qpf"));
  ScalarField f = read_scalar_field(dir / (stem + ".qpf"), grid);
  f.boundary() = read_real_boundary_trace(dir / (stem + "_boundary.qpf"), *grid);
  return f;
}

}  // namespace

void write_illumination_set(const fs::path& dir, const std::string& stem, const Grid& grid,
                            const IlluminationSet& illum) {
  json side;
  side["cgo"] = json::array();
  side["files"] = json::array();
  for (size_t j = 0; j < illum.g.size(); ++j) {
    const std::string name = stem + "_g" + std::to_string(j) + ".qpf";
    write_boundary_trace(dir / name, grid, illum.g[j]);
    side["files"].push_back(name);
    side["cgo"].push_back(cgo_to_json(illum.cgo[j]));
  }
  side["epsilon"] = illum.epsilon;
  side["epsilon_hat"] = illum.epsilon_hat;
  side["trace_scale"] = illum.trace_scale;
  write_text(dir / (stem + ".json"), side.dump(2) + "\n");
}

IlluminationSet read_illumination_set(const fs::path& sidecar, const Grid& grid) {
  const json side = read_json(sidecar);
  IlluminationSet illum;
  try {
    for (const auto& c : side.at("cgo")) illum.cgo.push_back(cgo_from_json(c));
    for (const auto& f : side.at("files")) {
      const fs::path p = sidecar.parent_path() / f.get<std::string>();
      require_file(p);
      illum.g.push_back(read_boundary_trace(p, grid));
    }
    illum.epsilon = side.at("epsilon").get<double>();
    illum.epsilon_hat = side.at("epsilon_hat").get<double>();
    illum.trace_scale = side.at("trace_scale").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, sidecar.string() + ": " + e.what());
  }
  require(illum.cgo.size() == illum.g.size() && illum.trace_scale.size() == illum.g.size(),
          ErrorKind::format, sidecar.string() + ": inconsistent illumination lists");
  return illum;
}

void write_dataset(const fs::path& dir, const Dataset& ds, const ExperimentConfig& cfg, double delta,
                   std::uint64_t seed) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::io, "cannot create " + dir.string());
  const Grid& grid = *ds.grid;
  json m;
  m["format"] = "qpat-dataset";
  m["version"] = 1;
  m["domain"] = to_json(grid.domain());
  m["grid"] = {{"nx", grid.nx()}, {"ny", grid.ny()}, {"dx", grid.dx()}, {"dy", grid.dy()},
               {"origin", to_json(grid.origin())}, {"boundary_points", grid.boundary_size()}};
  m["mode"] = to_string(cfg.mode);
  m["gamma_margin"] = cfg.resolved_gamma_margin();
  m["trusted_margin"] = cfg.resolved_trusted_margin();
  if (cfg.pole_reach) m["pole_reach"] = *cfg.pole_reach;
  m["medium"] = ds.medium;
  m["noise"] = {{"level", delta}, {"seed", seed}, {"kind", cfg.noise_kind == NoiseKind::smooth ? "smooth" : "white"}};
  m["sources"] = json::array();
  for (size_t i = 0; i < ds.sources.size(); ++i) {
    const SourceData& s = ds.sources[i];
    const std::string stem = "s" + std::to_string(i);
    json src;
    src["pole"] = to_json(s.x0);
    src["pair"] = {cgo_to_json(s.pair.first), cgo_to_json(s.pair.second)};
    src["achieved_noise_ratio"] = s.data.achieved_ratio;
    src["illumination"] = stem + "_illum.json";
    write_illumination_set(dir, stem + "_illum", grid, s.data.illum);
    src["data"] = json::array();
    for (size_t j = 0; j < s.data.d.size(); ++j) {
      const std::string name = stem + "_d" + std::to_string(j);
      write_field(dir / (name + ".qpf"), s.data.d[j]);
      write_boundary_trace(dir / (name + "_boundary.qpf"), grid, Eigen::VectorXcd(s.data.d[j].boundary()));
      src["data"].push_back(name);
    }
    m["sources"].push_back(src);
  }
  write_boundary_trace(dir / "sqrtD_boundary.qpf", grid, ds.sqrtD_boundary);
  m["sqrtD_boundary"] = "sqrtD_boundary.qpf";
  if (ds.sqrtD_cut) {
    write_field(dir / "sqrtD_cut.qpf", *ds.sqrtD_cut);
    m["sqrtD_cut"] = "sqrtD_cut.qpf";
  }
  if (ds.truth) {
    write_with_boundary(dir, "truth_mu", ds.truth->mu);
    write_with_boundary(dir, "truth_q", ds.truth->q);
    write_with_boundary(dir, "truth_sqrtD", ds.truth->sqrtD);
    write_with_boundary(dir, "truth_sigma_a", ds.truth->sigma_a);
    m["truth"] = {{"mu", "truth_mu"}, {"q", "truth_q"}, {"sqrtD", "truth_sqrtD"}, {"sigma_a", "truth_sigma_a"}};
  }
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

Dataset read_dataset(const fs::path& dir, ExperimentConfig& cfg) {
  const fs::path manifest = dir / "manifest.json";
  require(fs::exists(manifest), ErrorKind::io, "missing manifest " + manifest.string());
  const json m = read_json(manifest);
  Dataset ds;
  try {
    require(m.at("format") == "qpat-dataset" && m.at("version") == 1, ErrorKind::format,
            "unsupported dataset manifest");
    cfg.domain = detail::domain_from_json(m.at("domain"));
    ds.grid = Grid::build(cfg.domain, m.at("grid").at("nx").get<int>(), m.at("grid").at("ny").get<int>());
    require(ds.grid->boundary_size() == m.at("grid").at("boundary_points").get<int>(), ErrorKind::format,
            "boundary point count differs from the manifest");
    cfg.mode = m.at("mode") == "multi-source" ? SourceMode::multi_source : SourceMode::two_source;
    cfg.gamma_margin = m.at("gamma_margin").get<double>();
    cfg.trusted_margin = m.at("trusted_margin").get<double>();
    if (m.contains("pole_reach")) cfg.pole_reach = m["pole_reach"].get<double>();
    ds.medium = m.value("medium", "");
    cfg.poles.clear();
    for (const auto& src : m.at("sources")) {
      SourceData s;
      s.x0 = json_point(src.at("pole"), "pole");
      s.pair.first = cgo_from_json(src.at("pair").at(0));
      s.pair.second = cgo_from_json(src.at("pair").at(1));
      s.data.illum = read_illumination_set(dir / src.at("illumination").get<std::string>(), *ds.grid);
      s.data.achieved_ratio = src.value("achieved_noise_ratio", 0.0);
      s.data.noise_level = m.at("noise").at("level").get<double>();
      s.data.seed = m.at("noise").at("seed").get<std::uint64_t>();
      for (const auto& name : src.at("data")) {
        const std::string stem = name.get<std::string>();
        require_file(dir / (stem + ".qpf"));
        require_file(dir / (stem + "_boundary.qpf"));
        ComplexField d = read_complex_field(dir / (stem + ".qpf"), ds.grid);
        d.boundary() = read_boundary_trace(dir / (stem + "_boundary.qpf"), *ds.grid);
        s.data.d.push_back(std::move(d));
      }
      require(s.data.d.size() == s.data.illum.g.size(), ErrorKind::format,
              "data and illumination counts differ");
      cfg.poles.push_back(s.x0);
      ds.sources.push_back(std::move(s));
    }
    require(!ds.sources.empty(), ErrorKind::format, "manifest lists no sources");
    cfg.x0 = ds.sources.front().x0;
    const fs::path b = dir / m.at("sqrtD_boundary").get<std::string>();
    require_file(b);
    ds.sqrtD_boundary = read_real_boundary_trace(b, *ds.grid);
    if (m.contains("sqrtD_cut")) {
      const fs::path c = dir / m["sqrtD_cut"].get<std::string>();
      require_file(c);
      ds.sqrtD_cut = read_scalar_field(c, ds.grid);
    }
    if (m.contains("truth")) {
      const json& t = m["truth"];
      GroundTruth truth;
      truth.mu = read_with_boundary(dir, t.at("mu").get<std::string>(), ds.grid);
      truth.q = read_with_boundary(dir, t.at("q").get<std::string>(), ds.grid);
      truth.sqrtD = read_with_boundary(dir, t.at("sqrtD").get<std::string>(), ds.grid);
      truth.sigma_a = read_with_boundary(dir, t.at("sigma_a").get<std::string>(), ds.grid);
      ds.truth = std::move(truth);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, manifest.string() + ": " + e.what());
  }
  return ds;
}

namespace {

json norms_json(const std::optional<ErrorNorms>& e) {
  if (!e) return nullptr;
  return {{"sup", e->sup}, {"c1", e->c1}, {"abs_sup", e->abs_sup}};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json run_metrics(const ReconstructionRun& run) {
  const ReconstructionReport& r = run.report;
  json m;
  m["region_nodes"] = count(r.region);
  m["schroedinger_residual"] = r.schroedinger_residual;
  m["liouville_residual"] = r.liouville_residual;
  m["min_mu"] = r.min_mu;
  m["min_sqrtD"] = r.min_sqrtD;
  m["min_sigma_a"] = r.min_sigma_a;
  m["coverage"] = run.mu.coverage;
  m["other_branch_residual"] = finite_or_null(run.mu.other_branch_residual);
  m["flatness"] = run.flatness;
  m["min_branch_modulus"] = run.min_branch_modulus;
  m["eta"] = run.eta;
  if (run.min_det) {
    m["min_det"] = *run.min_det;
    m["min_normalized_det"] = *run.min_normalized_det;
    m["max_curl"] = finite_or_null(run.mu.max_curl);
    m["curl_flag"] = run.mu.curl_flag;
  }
  m["errors"] = {{"mu", norms_json(r.mu_error)},
                 {"q", norms_json(r.q_error)},
                 {"sqrtD", norms_json(r.sqrtD_error)},
                 {"sigma_a", norms_json(r.sigma_a_error)}};
  return m;
}

void write_report(const fs::path& dir, const ReconstructionRun& run, const json& context) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::io, "cannot create " + dir.string());
  const ReconstructionReport& r = run.report;
  write_field(dir / "mu.qpf", restrict_to(r.mu, r.region));
  write_field(dir / "q.qpf", restrict_to(r.q, r.region));
  write_field(dir / "sqrtD.qpf", restrict_to(r.sqrtD, r.region));
  write_field(dir / "sigma_a.qpf", restrict_to(r.sigma_a, r.region));
  json m = run_metrics(run);
  if (!context.is_null()) m["context"] = context;
  write_text(dir / "metrics.json", m.dump(2) + "\n");
}

}  // namespace qpat
