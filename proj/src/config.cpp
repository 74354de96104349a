#include "qpat/config.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace qpat {

using nlohmann::json;

std::string_view to_string(SourceMode m) {
  return m == SourceMode::two_source ? "two-source" : "multi-source";
}

std::string_view to_string(PairKind p) {
  return p == PairKind::decaying ? "decaying" : "growing-decaying";
}

std::string_view to_string(StudyKind k) {
  switch (k) {
    case StudyKind::refinement: return "refinement";
    case StudyKind::h_sweep: return "h_sweep";
    case StudyKind::stability: return "stability";
    case StudyKind::exit_stability: return "exit_stability";
    case StudyKind::multisource: return "multisource";
  }
  return "?";
}

StudyKind parse_study_kind(std::string_view s) {
  for (StudyKind k : {StudyKind::refinement, StudyKind::h_sweep, StudyKind::stability,
                      StudyKind::exit_stability, StudyKind::multisource})
    if (to_string(k) == s) return k;
  throw Error(ErrorKind::config, "unknown study kind '" + std::string(s) + "'");
}

double ExperimentConfig::resolved_gamma_margin() const {
  return gamma_margin.value_or(0.1 * domain.perimeter());
}

double ExperimentConfig::resolved_trusted_margin() const {
  return trusted_margin.value_or(0.15 * domain.diameter());
}

double ExperimentConfig::resolved_pole_reach(const Point& pole) const {
  return pole_reach.value_or(default_pole_reach(domain, pole));
}

Vec2 ExperimentConfig::resolved_omega(const Point& pole) const {
  return omega.value_or(default_omega(domain, pole));
}

void ExperimentConfig::validate() const {
  require(schema == 1, ErrorKind::config, "unsupported schema version " + std::to_string(schema));
  require(!grid_sizes.empty(), ErrorKind::config, "grid size list is empty");
  for (int n : grid_sizes) require(n >= 3, ErrorKind::config, "grid size must be at least 3");
  require(!h.empty(), ErrorKind::config, "h list is empty");
  for (double v : h) require(v > 0.0 && v < 1.0, ErrorKind::config, "h must lie in (0, 1)");
  require(cutoff_width > 0.0, ErrorKind::config, "cutoff width must be positive");
  require(cutoff_width < resolved_gamma_margin(), ErrorKind::config,
          "cutoff width must be smaller than the gamma margin");
  require(resolved_gamma_margin() > 0.0, ErrorKind::config, "gamma margin must be positive");
  require(resolved_trusted_margin() >= 0.0, ErrorKind::config, "trusted margin must be non-negative");
  require(epsilon >= 0.0, ErrorKind::config, "epsilon must be non-negative");
  require(!noise_levels.empty(), ErrorKind::config, "noise level list is empty");
  for (double d : noise_levels) require(d >= 0.0, ErrorKind::config, "noise levels must be non-negative");
  require(!seeds.empty(), ErrorKind::config, "seed list is empty");
  require(simulation.refine >= 1, ErrorKind::config, "refinement factor must be at least 1");
  require(simulation.solver.tol > 0.0, ErrorKind::config, "solver tolerance must be positive");
  require(trace.tol > 0.0 && trace.safety > 0.0 && trace.max_step_cells > 0.0, ErrorKind::config,
          "trace options must be positive");
  if (mode == SourceMode::multi_source)
    require(poles.size() >= 2, ErrorKind::config, "multi-source mode needs at least two poles");
  for (const Point& p : mode == SourceMode::multi_source ? poles : std::vector<Point>{x0})
    require(outside_hull(domain, p), ErrorKind::config, "pole lies inside the convex hull");
  if (omega) require(std::abs(omega->norm() - 1.0) < 1e-12, ErrorKind::config, "omega must be a unit vector");
  if (files) {
    for (const auto& p : {files->D, files->sigma_a})
      require(std::filesystem::exists(p), ErrorKind::config, "coefficient file not found: " + p.string());
    if (files->G)
      require(std::filesystem::exists(*files->G), ErrorKind::config,
              "coefficient file not found: " + files->G->string());
    require(grid_sizes.size() == 1, ErrorKind::config, "coefficient files fix a single grid size");
  } else {
    (void)qpat::scenario(scenario);
  }
}

namespace {

using detail::check_keys;
using detail::domain_from_json;

Point point(const json& j, const std::string& what) { return detail::json_point(j, what); }

template <class T>
std::vector<T> list(const json& j, const std::string& what) {
  if (!j.is_array()) return {j.get<T>()};
  std::vector<T> out;
  for (const auto& v : j) out.push_back(v.get<T>());
  require(!out.empty(), ErrorKind::config, what + " list is empty");
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("malformed JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    check_keys(j,
               {"schema", "domain", "grid", "cgo", "segmentation", "coefficients", "noise", "sources",
                "solver", "trace", "sqrtD_mode", "study", "output", "data"},
               "config");
    c.schema = j.value("schema", 1);
    if (j.contains("domain")) c.domain = domain_from_json(j["domain"]);
    if (j.contains("grid")) {
      check_keys(j["grid"], {"sizes"}, "grid");
      c.grid_sizes = list<int>(j["grid"].at("sizes"), "grid.sizes");
    }
    if (j.contains("cgo")) {
      const json& g = j["cgo"];
      check_keys(g, {"x0", "omega", "h", "pair", "cutoff_width", "epsilon"}, "cgo");
      if (g.contains("x0")) c.x0 = point(g["x0"], "cgo.x0");
      if (g.contains("omega")) c.omega = point(g["omega"], "cgo.omega");
      if (g.contains("h")) c.h = list<double>(g["h"], "cgo.h");
      const std::string pair = g.value("pair", "decaying");
      require(pair == "decaying" || pair == "growing-decaying", ErrorKind::config,
              "unknown CGO pair '" + pair + "'");
      c.pair = pair == "decaying" ? PairKind::decaying : PairKind::growing_decaying;
      c.cutoff_width = g.value("cutoff_width", c.cutoff_width);
      c.epsilon = g.value("epsilon", 0.0);
    }
    if (j.contains("segmentation")) {
      const json& s = j["segmentation"];
      check_keys(s, {"gamma_margin", "trusted_margin", "pole_reach"}, "segmentation");
      if (s.contains("gamma_margin")) c.gamma_margin = s["gamma_margin"].get<double>();
      if (s.contains("trusted_margin")) c.trusted_margin = s["trusted_margin"].get<double>();
      if (s.contains("pole_reach")) c.pole_reach = s["pole_reach"].get<double>();
    }
    if (j.contains("coefficients")) {
      const json& s = j["coefficients"];
      check_keys(s, {"scenario", "D", "sigma_a", "G"}, "coefficients");
      if (s.contains("D") || s.contains("sigma_a")) {
        require(s.contains("D") && s.contains("sigma_a"), ErrorKind::config,
                "coefficient files need both D and sigma_a");
        require(!s.contains("scenario"), ErrorKind::config, "give either a scenario or coefficient files");
        CoefficientFiles f{resolve(base_dir, s["D"].get<std::string>()),
                           resolve(base_dir, s["sigma_a"].get<std::string>()), std::nullopt};
        if (s.contains("G")) f.G = resolve(base_dir, s["G"].get<std::string>());
        c.files = f;
      } else {
        c.scenario = s.value("scenario", c.scenario);
      }
    }
    if (j.contains("noise")) {
      const json& s = j["noise"];
      check_keys(s, {"levels", "seeds", "kind"}, "noise");
      if (s.contains("levels")) c.noise_levels = list<double>(s["levels"], "noise.levels");
      if (s.contains("seeds")) c.seeds = list<std::uint64_t>(s["seeds"], "noise.seeds");
      const std::string kind = s.value("kind", "smooth");
      require(kind == "smooth" || kind == "white", ErrorKind::config, "unknown noise kind '" + kind + "'");
      c.noise_kind = kind == "smooth" ? NoiseKind::smooth : NoiseKind::white;
    }
    if (j.contains("sources")) {
      const json& s = j["sources"];
      check_keys(s, {"mode", "poles", "det_tol", "curl_tol"}, "sources");
      const std::string mode = s.value("mode", "two-source");
      require(mode == "two-source" || mode == "multi-source", ErrorKind::config,
              "unknown source mode '" + mode + "'");
      c.mode = mode == "two-source" ? SourceMode::two_source : SourceMode::multi_source;
      if (s.contains("poles")) {
        c.poles.clear();
        for (const auto& p : s["poles"]) c.poles.push_back(point(p, "sources.poles"));
      }
      c.det_tol = s.value("det_tol", c.det_tol);
      c.curl_tol = s.value("curl_tol", c.curl_tol);
    }
    if (j.contains("solver")) {
      const json& s = j["solver"];
      check_keys(s, {"method", "tol", "max_iter", "cond_limit", "refine"}, "solver");
      const std::string method = s.value("method", "sparse_direct");
      require(method == "sparse_direct" || method == "conjugate_residual", ErrorKind::config,
              "unknown solver method '" + method + "'");
      c.simulation.solver.method =
          method == "sparse_direct" ? SolveMethod::sparse_direct : SolveMethod::conjugate_residual;
      c.simulation.solver.tol = s.value("tol", c.simulation.solver.tol);
      c.simulation.solver.max_iter = s.value("max_iter", c.simulation.solver.max_iter);
      c.simulation.solver.cond_limit = s.value("cond_limit", c.simulation.solver.cond_limit);
      c.simulation.refine = s.value("refine", c.simulation.refine);
    }
    if (j.contains("trace")) {
      const json& s = j["trace"];
      check_keys(s, {"tol", "max_step_cells", "exit_tol", "safety"}, "trace");
      c.trace.tol = s.value("tol", c.trace.tol);
      c.trace.max_step_cells = s.value("max_step_cells", c.trace.max_step_cells);
      c.trace.exit_tol = s.value("exit_tol", c.trace.exit_tol);
      c.trace.safety = s.value("safety", c.trace.safety);
    }
    if (j.contains("sqrtD_mode")) c.sqrtD_mode = parse_sqrtD_mode(j["sqrtD_mode"].get<std::string>());
    if (j.contains("study")) c.study = parse_study_kind(j["study"].get<std::string>());
    if (j.contains("output")) c.output = resolve(base_dir, j["output"].get<std::string>());
    if (j.contains("data")) c.data = resolve(base_dir, j["data"].get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(bool(in), ErrorKind::io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace qpat
